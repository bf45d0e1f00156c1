#ifndef QFC_ERROR_HPP
#define QFC_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace qfc {

enum class Errc {
    InvalidArgument,
    ZeroVolume,
    EmptyRange,
    AllZero,
    NoConvergence,
    SingularResolvent,
    UnstableState,
    NotSymmetric,
    NonFinite,
    Unstable,
    NoFeasiblePoint,
    Parse,
    Validation,
};

constexpr std::string_view to_string(Errc code) {
    switch (code) {
        case Errc::InvalidArgument: return "InvalidArgument";
        case Errc::ZeroVolume: return "ZeroVolume";
        case Errc::EmptyRange: return "EmptyRange";
        case Errc::AllZero: return "AllZero";
        case Errc::NoConvergence: return "NoConvergence";
        case Errc::SingularResolvent: return "SingularResolvent";
        case Errc::UnstableState: return "UnstableState";
        case Errc::NotSymmetric: return "NotSymmetric";
        case Errc::NonFinite: return "NonFinite";
        case Errc::Unstable: return "Unstable";
        case Errc::NoFeasiblePoint: return "NoFeasiblePoint";
        case Errc::Parse: return "ParseError";
        case Errc::Validation: return "ValidationError";
    }
    return "Unknown";
}

// Every library failure is reported through this type; code() identifies the
// failure class so callers (and the CLI exit-code mapping) can branch on it.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace qfc

#endif // QFC_ERROR_HPP
