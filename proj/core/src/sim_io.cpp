#include "stea/sim_io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace stea {

static_assert(std::endian::native == std::endian::little,
              "binary similarity files assume a little-endian host");

namespace {

constexpr char kMagic[8] = {'S', 'T', 'E', 'A', 'S', 'I', 'M', '1'};
constexpr const char* kTextMagic = "#stea-sim 1";

const Kg& row_kg(const KgPair& pair, Direction d) {
  return d == Direction::SourceToTarget ? pair.source() : pair.target();
}
const Kg& col_kg(const KgPair& pair, Direction d) {
  return d == Direction::SourceToTarget ? pair.target() : pair.source();
}

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s, const std::string& origin, std::size_t line) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw ParseError(origin, line, "invalid number '" + std::string(s) + "'");
  return v;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab == std::string_view::npos ? tab : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return fields;
}

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& in, const std::string& origin) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v))
    throw ParseError(origin, 0, "truncated binary similarity file");
  return v;
}

void check_shape(const SimMatrix& m, const KgPair& pair) {
  if (m.rows() != row_kg(pair, m.direction()).num_entities() ||
      m.cols() != col_kg(pair, m.direction()).num_entities())
    throw std::invalid_argument("similarity matrix shape does not match the KG pair");
}

SimMatrix read_binary(std::istream& in, const KgPair& pair, const std::string& origin) {
  const auto dir = get<std::uint8_t>(in, origin);
  const auto layout = get<std::uint8_t>(in, origin);
  if (dir > 1 || layout > 1) throw ParseError(origin, 0, "bad binary header");
  const auto direction = static_cast<Direction>(dir);
  const auto rows = get<std::uint64_t>(in, origin);
  const auto cols = get<std::uint64_t>(in, origin);
  const auto fill = get<double>(in, origin);
  if (rows != row_kg(pair, direction).num_entities() ||
      cols != col_kg(pair, direction).num_entities())
    throw ParseError(origin, 0, "matrix shape does not match the loaded KGs");
  if (layout == 0) {
    std::vector<double> values(rows * cols);
    if (!in.read(reinterpret_cast<char*>(values.data()),
                 static_cast<std::streamsize>(values.size() * sizeof(double))))
      throw ParseError(origin, 0, "truncated dense payload");
    return SimMatrix::dense(direction, rows, cols, std::move(values));
  }
  std::vector<std::vector<Scored>> topk(rows);
  for (auto& row : topk) {
    const auto count = get<std::uint32_t>(in, origin);
    row.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
      const auto id = get<std::uint32_t>(in, origin);
      const auto score = get<double>(in, origin);
      row.push_back(Scored{id, score});
    }
  }
  return SimMatrix::sparse(direction, rows, cols, std::move(topk), fill);
}

SimMatrix read_text(std::istream& in, const KgPair& pair, const std::string& origin) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return true;
    }
    return false;
  };
  if (!next_line() || line != kTextMagic) throw ParseError(origin, line_no, "missing header");

  auto header = [&](const char* key) -> std::string {
    if (!next_line()) throw ParseError(origin, line_no, std::string("missing '") + key + "'");
    const auto fields = split_tabs(line);
    if (fields.size() != 2 || fields[0] != key)
      throw ParseError(origin, line_no, std::string("expected '") + key + "<TAB>value'");
    return std::string(fields[1]);
  };
  Direction direction;
  try {
    direction = parse_direction(header("direction"));
  } catch (const ConfigError& e) {
    throw ParseError(origin, line_no, e.what());
  }
  const auto rows = static_cast<std::size_t>(std::stoull(header("rows")));
  const auto cols = static_cast<std::size_t>(std::stoull(header("cols")));
  const std::string layout = header("layout");
  if (layout != "dense" && layout != "topk") throw ParseError(origin, line_no, "unknown layout");
  const bool sparse = layout == "topk";
  const double fill = sparse ? parse_double(header("fill"), origin, line_no) : 0.0;

  const Kg& rkg = row_kg(pair, direction);
  const Kg& ckg = col_kg(pair, direction);
  if (rows != rkg.num_entities() || cols != ckg.num_entities())
    throw ParseError(origin, line_no, "matrix shape does not match the loaded KGs");

  std::vector<double> values(sparse ? 0 : rows * cols);
  std::vector<std::vector<Scored>> topk(sparse ? rows : 0);
  std::vector<bool> seen(rows, false);
  std::size_t seen_count = 0;
  while (next_line()) {
    const auto fields = split_tabs(line);
    const auto r = rkg.find_entity(fields[0]);
    if (!r) throw ParseError(origin, line_no, "unknown row entity '" + std::string(fields[0]) + "'");
    if (seen[*r]) throw ParseError(origin, line_no, "row entity listed twice");
    seen[*r] = true;
    ++seen_count;
    if (!sparse) {
      if (fields.size() != cols + 1)
        throw ParseError(origin, line_no, "dense row has wrong number of scores");
      for (std::size_t c = 0; c < cols; ++c)
        values[*r * cols + c] = parse_double(fields[c + 1], origin, line_no);
    } else {
      if (fields.size() % 2 != 1) throw ParseError(origin, line_no, "unpaired column/score");
      for (std::size_t i = 1; i < fields.size(); i += 2) {
        const auto c = ckg.find_entity(fields[i]);
        if (!c)
          throw ParseError(origin, line_no, "unknown column entity '" + std::string(fields[i]) + "'");
        topk[*r].push_back(Scored{*c, parse_double(fields[i + 1], origin, line_no)});
      }
    }
  }
  if (seen_count != rows) throw ParseError(origin, line_no, "missing rows");
  try {
    return sparse ? SimMatrix::sparse(direction, rows, cols, std::move(topk), fill)
                  : SimMatrix::dense(direction, rows, cols, std::move(values));
  } catch (const std::exception& e) {
    throw ParseError(origin, line_no, e.what());
  }
}

}  // namespace

void write_sim_matrix(std::ostream& out, const SimMatrix& m, const KgPair& pair,
                      SimFileFormat format) {
  check_shape(m, pair);
  if (format == SimFileFormat::Binary) {
    out.write(kMagic, sizeof kMagic);
    put<std::uint8_t>(out, static_cast<std::uint8_t>(m.direction()));
    put<std::uint8_t>(out, m.is_sparse() ? 1 : 0);
    put<std::uint64_t>(out, m.rows());
    put<std::uint64_t>(out, m.cols());
    put<double>(out, m.fill());
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (!m.is_sparse()) {
        const auto row = m.row(r);
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(row.size() * sizeof(double)));
        continue;
      }
      const auto row = m.sparse_row(r);
      put<std::uint32_t>(out, static_cast<std::uint32_t>(row.size()));
      for (const auto& s : row) {
        put<std::uint32_t>(out, s.id);
        put<double>(out, s.score);
      }
    }
    return;
  }
  const Kg& rkg = row_kg(pair, m.direction());
  const Kg& ckg = col_kg(pair, m.direction());
  out << kTextMagic << '\n'
      << "direction\t" << to_string(m.direction()) << '\n'
      << "rows\t" << m.rows() << '\n'
      << "cols\t" << m.cols() << '\n'
      << "layout\t" << (m.is_sparse() ? "topk" : "dense") << '\n';
  if (m.is_sparse()) out << "fill\t" << format_double(m.fill()) << '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    out << rkg.entity_label(static_cast<EntityId>(r));
    if (!m.is_sparse()) {
      for (double v : m.row(r)) out << '\t' << format_double(v);
    } else {
      for (const auto& s : m.sparse_row(r))
        out << '\t' << ckg.entity_label(s.id) << '\t' << format_double(s.score);
    }
    out << '\n';
  }
}

void write_sim_matrix(const std::filesystem::path& path, const SimMatrix& m, const KgPair& pair,
                      SimFileFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write similarity file " + path.string());
  write_sim_matrix(out, m, pair, format);
  if (!out) throw std::runtime_error("failed writing similarity file " + path.string());
}

SimMatrix read_sim_matrix(std::istream& in, const KgPair& pair, const std::string& origin) {
  char head[sizeof kMagic] = {};
  in.read(head, sizeof head);
  if (in.gcount() == static_cast<std::streamsize>(sizeof head) &&
      std::memcmp(head, kMagic, sizeof kMagic) == 0)
    return read_binary(in, pair, origin);
  in.clear();
  in.seekg(0);
  return read_text(in, pair, origin);
}

SimMatrix read_sim_matrix(const std::filesystem::path& path, const KgPair& pair) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open similarity file " + path.string());
  return read_sim_matrix(in, pair, path.string());
}

}  // namespace stea
