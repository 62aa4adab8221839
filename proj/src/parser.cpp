// SPDX-License-Identifier: Apache-2.0
#include "aad/parser.hpp"

#include <cctype>
#include <string>

namespace aad {

std::string_view to_string(Verdict verdict) noexcept {
  switch (verdict) {
    case Verdict::yes:
      return "yes";
    case Verdict::no:
      return "no";
    case Verdict::unparseable:
      break;
  }
  return "unparseable";
}

Verdict extract_verdict(std::string_view text) {
  std::string word;
  const auto check = [&word]() -> Verdict {
    if (word == "yes") return Verdict::yes;
    if (word == "no") return Verdict::no;
    return Verdict::unparseable;
  };
  for (const char raw : text) {
    const auto c = static_cast<unsigned char>(raw);
    if (std::isalnum(c) != 0) {
      word += static_cast<char>(std::tolower(c));
      continue;
    }
    if (const Verdict v = check(); v != Verdict::unparseable) {
      return v;
    }
    word.clear();
  }
  return check();
}

}  // namespace aad
