#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fsgkit {

enum class ErrorKind {
    InvalidArgument,
    InvalidMesh,
    HPRDegenerate,
    EmptyCloud,
    DegenerateHull,
    SchemaError,
    AssetMissing,
    JointLimit,
    FaceDegenerate,
    EmptyWorkspace,
    InvalidContact,
    NoGraspFound,
    NotFound,
    IoError,
};

inline std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::InvalidMesh: return "InvalidMesh";
        case ErrorKind::HPRDegenerate: return "HPRDegenerate";
        case ErrorKind::EmptyCloud: return "EmptyCloud";
        case ErrorKind::DegenerateHull: return "DegenerateHull";
        case ErrorKind::SchemaError: return "SchemaError";
        case ErrorKind::AssetMissing: return "AssetMissing";
        case ErrorKind::JointLimit: return "JointLimit";
        case ErrorKind::FaceDegenerate: return "FaceDegenerate";
        case ErrorKind::EmptyWorkspace: return "EmptyWorkspace";
        case ErrorKind::InvalidContact: return "InvalidContact";
        case ErrorKind::NoGraspFound: return "NoGraspFound";
        case ErrorKind::NotFound: return "NotFound";
        case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Raised when hull input is affinely dependent; `rank` is the affine rank found.
class DegenerateHullError : public Error {
public:
    DegenerateHullError(int rank, const std::string& message)
        : Error(ErrorKind::DegenerateHull, message + " (affine rank " + std::to_string(rank) + ")"),
          rank_(rank) {}

    int rank() const noexcept { return rank_; }

private:
    int rank_;
};

}  // namespace fsgkit
