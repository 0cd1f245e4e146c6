#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ensemble {

// Malformed input data (corpora, models, traces, configs). The CLI maps this
// to exit code 2.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Error inside bracketed-tree text. `offset` is a 1-based character position;
// unexpected end of input reports length+1.
struct BracketParseError : DataError {
  BracketParseError(const std::string& detail, std::size_t offset_)
      : DataError("parse error at offset " + std::to_string(offset_) + ": " + detail),
        offset(offset_) {}
  std::size_t offset;
};

// A boosting round whose hypotheses agree with nothing (zero denominator in
// the alpha computation). The CLI maps this to exit code 3.
struct UnboostableRoundError : std::runtime_error {
  explicit UnboostableRoundError(int round_)
      : std::runtime_error("unboostable round " + std::to_string(round_) +
                           ": no weighted agreement between hypotheses and gold"),
        round(round_) {}
  int round;
};

}  // namespace ensemble
