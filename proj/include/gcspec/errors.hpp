#ifndef GCSPEC_ERRORS_HPP
#define GCSPEC_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <utility>

namespace gcspec {

// All failures surface as Error with a stable machine-readable code
// (module-qualified, e.g. "VAR_SINGULAR_REGRESSORS"). The CLI maps
// these codes into its JSON error object.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

[[noreturn]] inline void fail(std::string code, const std::string& message)
{
    throw Error(std::move(code), message);
}

} // namespace gcspec

#endif
