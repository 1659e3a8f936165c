#pragma once

#include <stdexcept>
#include <string>

namespace afm {

/// Failure raised by any synthesis stage. `stage` names the module that
/// rejected its input and `code` is a stable machine-readable identifier
/// (e.g. "DuplicateRow", "IllegalParent").
class Error : public std::runtime_error {
public:
    Error(std::string stage, std::string code, const std::string& detail)
        : std::runtime_error(stage + ": " + code + (detail.empty() ? "" : ": " + detail)),
          stage_(std::move(stage)), code_(std::move(code)), detail_(detail) {}

    const std::string& stage() const noexcept { return stage_; }
    const std::string& code() const noexcept { return code_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    std::string stage_;
    std::string code_;
    std::string detail_;
};

}  // namespace afm
