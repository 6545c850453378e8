#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace znl {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class Errc {
    DimensionMismatch,
    NonFiniteOutput,
    MissingJacobian,
    StratonovichNotConverted,
    BlowUp,
    DtDoesNotDivideTau,
    MissingNoiseRecord,
    JumpsUnsupported,
    DegenerateDiffusion,
    KappaOutOfRange,
    EmptyCandidateSet,
    UnknownModel,
    BadParams,
    SyntaxError,
    UnknownIdentifier,
    ArityError,
    EvalError,
    SingularJacobian,
    IoError,
    ConfigError,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message);
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string& message);

bool all_finite(const Vec& v);
bool all_finite(const Mat& m);

// Throws DimensionMismatch when x.size() != expected.
void require_dim(const Vec& x, Eigen::Index expected, const char* what);

}  // namespace znl
