#include "mmsarc/error.hpp"

namespace mmsarc {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::Parse: return "ParseError";
        case ErrorKind::Io: return "IoError";
        case ErrorKind::EmptyCorpus: return "EmptyCorpus";
        case ErrorKind::UnknownConcept: return "UnknownConcept";
        case ErrorKind::MissingImage: return "MissingImage";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::DuplicateBlock: return "DuplicateBlock";
        case ErrorKind::LayoutMismatch: return "LayoutMismatch";
        case ErrorKind::DegenerateLabels: return "DegenerateLabels";
        case ErrorKind::RaggedJudgments: return "RaggedJudgments";
        case ErrorKind::DegenerateMarginals: return "DegenerateMarginals";
        case ErrorKind::ProtocolViolation: return "ProtocolViolation";
        case ErrorKind::InsufficientData: return "InsufficientData";
    }
    return "Error";
}

}  // namespace mmsarc
