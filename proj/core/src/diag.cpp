#include <algorithm>

#include "ergo/parser.hpp"

namespace ergo {

std::string render_diagnostic(const Diagnostic& d, std::string_view source) {
  std::string out = "error:" + d.category;
  if (!d.message.empty()) out += ": " + d.message;
  out += "\n";

  size_t start = std::min<size_t>(d.span.start, source.size());
  size_t end = std::min<size_t>(std::max(d.span.end, d.span.start), source.size());

  size_t line_start = source.rfind('\n', start == 0 ? 0 : start - 1);
  line_start = line_start == std::string_view::npos ? 0 : line_start + 1;
  size_t line_end = source.find('\n', start);
  if (line_end == std::string_view::npos) line_end = source.size();

  std::string line(source.substr(line_start, line_end - line_start));
  for (auto& c : line)
    if (c == '\t') c = ' ';
  out += line + "\n";

  size_t col = start - line_start;
  size_t len = std::max<size_t>(1, std::min(end, line_end) - start);
  if (start >= line_end) {  // e.g. unexpected end of input
    col = line_end - line_start;
    len = 1;
  }
  out += std::string(col, ' ') + std::string(len, '~') + "\n";
  return out;
}

}  // namespace ergo
