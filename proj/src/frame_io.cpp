#include "blockframe/frame_io.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "blockframe/error.hpp"
#include "blockframe/text.hpp"

namespace blockframe {

namespace {

[[noreturn]] void fail(std::string_view origin, int line, const std::string& what) {
  throw ValidationError(std::string(origin) + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

std::string format_complex(cplx z) {
  std::string out = text::format_double(z.real());
  if (!std::signbit(z.imag())) out += '+';
  out += text::format_double(z.imag());
  out += 'j';
  return out;
}

cplx parse_complex(std::string_view s, std::string_view what) {
  s = text::trim(s);
  if (s.size() < 2 || s.back() != 'j') throw ValidationError(std::string(what) + ": expected re+imj, got '" + std::string(s) + "'");
  s.remove_suffix(1);
  std::size_t split = std::string_view::npos;
  for (std::size_t i = s.size(); i-- > 1;) {
    if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  if (split == std::string_view::npos)
    throw ValidationError(std::string(what) + ": expected re+imj, got '" + std::string(s) + "j'");
  const double re = text::parse_double(s.substr(0, split), what);
  std::string_view im = s.substr(split);
  if (im.front() == '+') im.remove_prefix(1);
  return {re, text::parse_double(im, what)};
}

std::string format_frame(const Frame& frame, std::string_view comment) {
  std::ostringstream os;
  if (!comment.empty()) os << "# " << comment << "\n";
  const auto& spec = frame.spec();
  os << "frame v1 base=" << (spec ? to_string(spec->base) : std::string_view("custom")) << " N=" << frame.n()
     << " M=" << frame.m() << " NB=" << frame.blocks().num_blocks << "\n";
  if (spec) {
    os << "rows: " << text::join(spec->rows) << "\n";
    os << "perm: " << text::join(spec->permutation) << "\n";
    return os.str();
  }
  os << "matrix:\n";
  const CMatrix& a = frame.entries();
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) {
      if (c) os << ',';
      os << format_complex(a(r, c));
    }
    os << "\n";
  }
  return os.str();
}

Frame parse_frame(std::string_view content, int active_blocks, std::string_view origin) {
  std::vector<std::pair<int, std::string_view>> lines;
  int number = 0;
  for (std::string_view raw : text::split(content, '\n')) {
    ++number;
    const std::string_view line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    lines.emplace_back(number, line);
  }
  if (lines.empty()) fail(origin, 1, "empty frame file");

  const auto [header_line, header] = lines.front();
  const auto words = text::split(header, ' ');
  if (words.size() < 2 || words[0] != "frame" || words[1] != "v1")
    fail(origin, header_line, "expected header 'frame v1 base=... N=... M=... NB=...'");
  std::map<std::string, std::string, std::less<>> fields;
  for (std::size_t i = 2; i < words.size(); ++i) {
    if (words[i].empty()) continue;
    const auto eq = words[i].find('=');
    if (eq == std::string_view::npos) fail(origin, header_line, "malformed header field '" + std::string(words[i]) + "'");
    fields[std::string(words[i].substr(0, eq))] = std::string(words[i].substr(eq + 1));
  }
  for (const char* key : {"base", "N", "M", "NB"})
    if (!fields.count(key)) fail(origin, header_line, std::string("header lacks ") + key + "=");

  int n = 0, m = 0, nb = 0;
  try {
    n = text::parse_int(fields["N"], "N");
    m = text::parse_int(fields["M"], "M");
    nb = text::parse_int(fields["NB"], "NB");
  } catch (const ValidationError& e) {
    fail(origin, header_line, e.what());
  }
  if (n < 1 || m < 1 || nb < 1 || n % nb != 0)
    fail(origin, header_line, "need positive N, M, NB with NB dividing N");
  BlockModel blocks{nb, n / nb, active_blocks};
  try {
    blocks.validate();
  } catch (const ValidationError& e) {
    fail(origin, header_line, e.what());
  }

  auto section = [&](std::size_t index, std::string_view key) -> std::pair<int, std::string_view> {
    if (index >= lines.size()) fail(origin, lines.back().first, "missing '" + std::string(key) + ":' line");
    const auto [ln, line] = lines[index];
    if (line.substr(0, key.size()) != key || line.size() <= key.size() || line[key.size()] != ':')
      fail(origin, ln, "expected '" + std::string(key) + ":'");
    return {ln, text::trim(line.substr(key.size() + 1))};
  };

  if (fields["base"] == "custom") {
    const auto [matrix_line, rest] = section(1, "matrix");
    if (!rest.empty()) fail(origin, matrix_line, "unexpected text after 'matrix:'");
    if (lines.size() != 2 + static_cast<std::size_t>(m))
      fail(origin, matrix_line, "matrix section must hold exactly M=" + std::to_string(m) + " lines");
    CMatrix a(m, n);
    for (int r = 0; r < m; ++r) {
      const auto [ln, line] = lines[2 + r];
      const auto items = text::split(line, ',');
      if (static_cast<int>(items.size()) != n)
        fail(origin, ln, "matrix row has " + std::to_string(items.size()) + " entries, expected " + std::to_string(n));
      for (int c = 0; c < n; ++c) {
        try {
          a(r, c) = parse_complex(items[c], "matrix entry");
        } catch (const ValidationError& e) {
          fail(origin, ln, e.what());
        }
      }
    }
    try {
      return Frame(std::move(a), blocks);
    } catch (const ValidationError& e) {
      fail(origin, matrix_line, e.what());
    }
  }

  FrameSpec spec;
  try {
    spec.base = parse_base_kind(fields["base"]);
  } catch (const ValidationError& e) {
    fail(origin, header_line, e.what());
  }
  spec.n = n;
  spec.m = m;
  spec.blocks = blocks;
  const auto [rows_line, rows] = section(1, "rows");
  const auto [perm_line, perm] = section(2, "perm");
  if (lines.size() > 3) fail(origin, lines[3].first, "unexpected trailing content");
  try {
    spec.rows = text::parse_int_list(rows, "rows");
  } catch (const ValidationError& e) {
    fail(origin, rows_line, e.what());
  }
  try {
    spec.permutation = text::parse_int_list(perm, "perm");
  } catch (const ValidationError& e) {
    fail(origin, perm_line, e.what());
  }
  try {
    return construct_frame(spec);
  } catch (const ValidationError& e) {
    fail(origin, perm_line, e.what());
  }
}

void save_frame(const std::filesystem::path& path, const Frame& frame, std::string_view comment) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << format_frame(frame, comment);
  if (!out) throw ValidationError("failed writing " + path.string());
}

Frame load_frame(const std::filesystem::path& path, int active_blocks) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open frame file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_frame(buffer.str(), active_blocks, path.string());
}

}  // namespace blockframe
