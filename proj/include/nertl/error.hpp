#pragma once

#include <stdexcept>
#include <string>

namespace nertl {

// A caller broke a documented precondition.
struct ContractError : std::logic_error {
    explicit ContractError(const std::string& what)
        : std::logic_error("contract violation: " + what) {}
};

// A public numeric op produced a non-finite value.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what)
        : std::runtime_error("numeric overflow: " + what) {}
};

struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what)
        : std::runtime_error("parse error: " + what) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what)
        : std::runtime_error("io error: " + what) {}
};

// Checkpoint failed magic or checksum validation.
struct IntegrityError : std::runtime_error {
    explicit IntegrityError(const std::string& what)
        : std::runtime_error("integrity error: " + what) {}
};

// Checkpoint format version not supported.
struct VersionError : std::runtime_error {
    explicit VersionError(const std::string& what)
        : std::runtime_error("version error: " + what) {}
};

// Source/target label vocabularies differ under require_identical.
struct LabelMismatchError : std::runtime_error {
    explicit LabelMismatchError(const std::string& what)
        : std::runtime_error("label mismatch: " + what) {}
};

inline void require(bool cond, const std::string& what) {
    if (!cond) throw ContractError(what);
}

}  // namespace nertl
