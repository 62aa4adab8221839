// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string_view>

namespace aad {

enum class Verdict { yes, no, unparseable };

[[nodiscard]] std::string_view to_string(Verdict verdict) noexcept;

/// First whole word equal to "yes" or "no" (case-insensitive); words are
/// maximal runs of ASCII letters and digits. "not present" alone is unparseable.
[[nodiscard]] Verdict extract_verdict(std::string_view text);

}  // namespace aad
