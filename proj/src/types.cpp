#include "znl/types.hpp"

#include <cmath>
#include <sstream>

namespace znl {

const char* errc_name(Errc code) {
    switch (code) {
        case Errc::DimensionMismatch: return "DimensionMismatch";
        case Errc::NonFiniteOutput: return "NonFiniteOutput";
        case Errc::MissingJacobian: return "MissingJacobian";
        case Errc::StratonovichNotConverted: return "StratonovichNotConverted";
        case Errc::BlowUp: return "BlowUp";
        case Errc::DtDoesNotDivideTau: return "DtDoesNotDivideTau";
        case Errc::MissingNoiseRecord: return "MissingNoiseRecord";
        case Errc::JumpsUnsupported: return "JumpsUnsupported";
        case Errc::DegenerateDiffusion: return "DegenerateDiffusion";
        case Errc::KappaOutOfRange: return "KappaOutOfRange";
        case Errc::EmptyCandidateSet: return "EmptyCandidateSet";
        case Errc::UnknownModel: return "UnknownModel";
        case Errc::BadParams: return "BadParams";
        case Errc::SyntaxError: return "SyntaxError";
        case Errc::UnknownIdentifier: return "UnknownIdentifier";
        case Errc::ArityError: return "ArityError";
        case Errc::EvalError: return "EvalError";
        case Errc::SingularJacobian: return "SingularJacobian";
        case Errc::IoError: return "IoError";
        case Errc::ConfigError: return "ConfigError";
    }
    return "UnknownError";
}

namespace {
std::string format_message(Errc code, const std::string& message) {
    std::ostringstream out;
    out << errc_name(code) << ": " << message;
    return out.str();
}
}  // namespace

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(format_message(code, message)), code_(code) {}

void fail(Errc code, const std::string& message) { throw Error(code, message); }

bool all_finite(const Vec& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i])) return false;
    }
    return true;
}

bool all_finite(const Mat& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            if (!std::isfinite(m(i, j))) return false;
        }
    }
    return true;
}

void require_dim(const Vec& x, Eigen::Index expected, const char* what) {
    if (x.size() != expected) {
        std::ostringstream out;
        out << what << " has length " << x.size() << ", expected " << expected;
        fail(Errc::DimensionMismatch, out.str());
    }
}

}  // namespace znl
