#pragma once

#include <cstddef>

namespace gips {

// Location of a construct in spec source text. Lines and columns are 1-based.
struct SourceSpan {
  std::size_t offset = 0;
  std::size_t length = 0;
  std::size_t line = 1;
  std::size_t column = 1;

  // Spans never take part in structural equality of parsed constructs.
  friend bool operator==(const SourceSpan&, const SourceSpan&) { return true; }
};

}  // namespace gips
