#ifndef OPINEX_TEXT_HPP
#define OPINEX_TEXT_HPP

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace opinex {

/// Raised for malformed text input; the message carries "source:line: ..." context.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double value);

/// Parses the whole field as a double; throws ParseError naming `context`.
double parse_double(std::string_view text, std::string_view context);
long long parse_integer(std::string_view text, std::string_view context);

std::string_view trim(std::string_view text);
std::vector<std::string_view> split(std::string_view text, char delimiter);

}  // namespace opinex

#endif  // OPINEX_TEXT_HPP
