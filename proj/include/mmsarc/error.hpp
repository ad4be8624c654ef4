#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mmsarc {

enum class ErrorKind {
    InvalidArgument,
    Parse,
    Io,
    EmptyCorpus,
    UnknownConcept,
    MissingImage,
    DimensionMismatch,
    DuplicateBlock,
    LayoutMismatch,
    DegenerateLabels,
    RaggedJudgments,
    DegenerateMarginals,
    ProtocolViolation,
    InsufficientData,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so the CLI can print a
// single machine-parseable reason line.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace mmsarc
