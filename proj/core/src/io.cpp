#include "sparsest/io.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <vector>

#include "sparsest/errors.hpp"

namespace sparsest {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename Int>
Int parse_int(std::string_view text) {
  Int value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw FormatError("expected an integer, got '" + std::string(text) + "'");
  }
  return value;
}

// Reads "# key=value" lines up to and including the column header.
struct CsvTable {
  std::map<std::string, std::string, std::less<>> meta;
  std::vector<std::vector<std::string>> rows;
};

CsvTable read_table(std::istream& in, std::string_view expected_header) {
  CsvTable table;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    if (view.front() == '#') {
      const std::string_view body = trim(view.substr(1));
      const auto eq = body.find('=');
      if (eq != std::string_view::npos) {
        table.meta.emplace(std::string(trim(body.substr(0, eq))), std::string(trim(body.substr(eq + 1))));
      }
      continue;
    }
    if (!header_seen) {
      if (view != expected_header) {
        throw FormatError("expected header '" + std::string(expected_header) + "', got '" + std::string(view) + "'");
      }
      header_seen = true;
      continue;
    }
    std::vector<std::string> fields;
    for (auto f : split(view, ',')) fields.emplace_back(f);
    table.rows.push_back(std::move(fields));
  }
  if (!header_seen) throw FormatError("missing header '" + std::string(expected_header) + "'");
  return table;
}

const std::string& meta_value(const CsvTable& t, std::string_view key) {
  const auto it = t.meta.find(key);
  if (it == t.meta.end()) throw FormatError("missing header field '" + std::string(key) + "'");
  return it->second;
}

struct SketchHeader {
  double gamma;
  std::uint64_t seed;
  std::uint64_t stream;
  Eigen::Index n1;
  Eigen::Index n2;
  Eigen::Index p;
  double sigma0;
};

void write_sketch_header(std::ostream& out, std::string_view shape, const SketchHeader& h) {
  out << "# sparsest sketch\n"
      << "# sketch=" << shape << '\n'
      << "# gamma=" << format_double(h.gamma) << '\n'
      << "# seed=" << h.seed << '\n'
      << "# stream=" << h.stream << '\n'
      << "# n1=" << h.n1 << '\n'
      << "# n2=" << h.n2 << '\n'
      << "# p=" << h.p << '\n'
      << "# sigma0=" << format_double(h.sigma0) << '\n'
      << "index,kind,value\n";
}

SketchHeader read_sketch_header(const CsvTable& t, std::string_view shape) {
  if (meta_value(t, "sketch") != shape) throw FormatError("sketch file is not a " + std::string(shape) + " sketch");
  SketchHeader h{};
  h.gamma = parse_double(meta_value(t, "gamma"));
  h.seed = parse_int<std::uint64_t>(meta_value(t, "seed"));
  h.stream = parse_int<std::uint64_t>(meta_value(t, "stream"));
  h.n1 = parse_int<Eigen::Index>(meta_value(t, "n1"));
  h.n2 = parse_int<Eigen::Index>(meta_value(t, "n2"));
  h.p = parse_int<Eigen::Index>(meta_value(t, "p"));
  h.sigma0 = parse_double(meta_value(t, "sigma0"));
  if (static_cast<Eigen::Index>(t.rows.size()) != h.n1 + h.n2) {
    throw FormatError("sketch file holds " + std::to_string(t.rows.size()) + " measurements, header says " +
                      std::to_string(h.n1 + h.n2));
  }
  return h;
}

void read_sketch_values(const CsvTable& t, const SketchHeader& h, std::string_view first_kind,
                        std::string_view second_kind, Eigen::VectorXd& first, Eigen::VectorXd& second) {
  first.resize(h.n1);
  second.resize(h.n2);
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    const auto& row = t.rows[k];
    if (row.size() != 3) throw FormatError("sketch line " + std::to_string(k) + " needs 3 fields");
    const auto idx = parse_int<Eigen::Index>(row[0]);
    if (idx != static_cast<Eigen::Index>(k)) throw FormatError("sketch indices must be consecutive from 0");
    const double v = parse_double(row[2]);
    if (idx < h.n1) {
      if (row[1] != first_kind) throw FormatError("expected kind " + std::string(first_kind) + " at index " + row[0]);
      first[idx] = v;
    } else {
      if (row[1] != second_kind) throw FormatError("expected kind " + std::string(second_kind) + " at index " + row[0]);
      second[idx - h.n1] = v;
    }
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(len));
}

double parse_double(std::string_view text) {
  text = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw FormatError("expected a number, got '" + std::string(text) + "'");
  }
  return value;
}

void write_sketch_csv(std::ostream& out, const VectorSketch& sk) {
  write_sketch_header(out, "vector",
                      {sk.gamma, sk.origin.seed(), sk.origin.stream(), sk.n1(), sk.n2(), sk.p, sk.sigma0});
  for (Eigen::Index i = 0; i < sk.n1(); ++i) out << i << ",cauchy," << format_double(sk.y_cauchy[i]) << '\n';
  for (Eigen::Index i = 0; i < sk.n2(); ++i) {
    out << sk.n1() + i << ",gaussian," << format_double(sk.y_gauss[i]) << '\n';
  }
}

void write_sketch_csv(std::ostream& out, const MatrixSketch& sk) {
  write_sketch_header(out, "matrix",
                      {sk.gamma, sk.origin.seed(), sk.origin.stream(), sk.n1(), sk.n2(), sk.p, sk.sigma0});
  for (Eigen::Index i = 0; i < sk.n1(); ++i) out << i << ",identity-trace," << format_double(sk.y_trace[i]) << '\n';
  for (Eigen::Index i = 0; i < sk.n2(); ++i) {
    out << sk.n1() + i << ",gaussian-matrix," << format_double(sk.y_frob[i]) << '\n';
  }
}

VectorSketch read_vector_sketch_csv(std::istream& in) {
  const CsvTable t = read_table(in, "index,kind,value");
  const SketchHeader h = read_sketch_header(t, "vector");
  VectorSketch sk;
  sk.gamma = h.gamma;
  sk.p = h.p;
  sk.sigma0 = h.sigma0;
  sk.origin = RngStream(h.seed, h.stream);
  read_sketch_values(t, h, "cauchy", "gaussian", sk.y_cauchy, sk.y_gauss);
  return sk;
}

MatrixSketch read_matrix_sketch_csv(std::istream& in) {
  const CsvTable t = read_table(in, "index,kind,value");
  const SketchHeader h = read_sketch_header(t, "matrix");
  MatrixSketch sk;
  sk.gamma = h.gamma;
  sk.p = h.p;
  sk.sigma0 = h.sigma0;
  sk.origin = RngStream(h.seed, h.stream);
  read_sketch_values(t, h, "identity-trace", "gaussian-matrix", sk.y_trace, sk.y_frob);
  return sk;
}

void write_signal_csv(std::ostream& out, const Signal& x) {
  out << "index,value\n";
  for (Eigen::Index i = 0; i < x.size(); ++i) out << i << ',' << format_double(x[i]) << '\n';
}

Signal read_signal_csv(std::istream& in) {
  const CsvTable t = read_table(in, "index,value");
  Signal x(static_cast<Eigen::Index>(t.rows.size()));
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    const auto& row = t.rows[k];
    if (row.size() != 2) throw FormatError("signal line " + std::to_string(k) + " needs 2 fields");
    if (parse_int<Eigen::Index>(row[0]) != static_cast<Eigen::Index>(k)) {
      throw FormatError("signal indices must be consecutive from 0");
    }
    x[static_cast<Eigen::Index>(k)] = parse_double(row[1]);
  }
  if (x.size() == 0) throw FormatError("signal file has no entries");
  return x;
}

void write_reconstruction_csv(std::ostream& out, const Signal& x, const Signal& x_hat) {
  if (x.size() != x_hat.size()) throw ParameterError("signal and reconstruction lengths differ");
  out << "index,x,x_hat\n";
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    out << i << ',' << format_double(x[i]) << ',' << format_double(x_hat[i]) << '\n';
  }
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& X) {
  out << "# p=" << X.rows() << '\n' << "row,col,value\n";
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      if (X(i, j) != 0.0) out << i << ',' << j << ',' << format_double(X(i, j)) << '\n';
    }
  }
}

Eigen::MatrixXd read_matrix_csv(std::istream& in) {
  const CsvTable t = read_table(in, "row,col,value");
  struct Entry {
    Eigen::Index i, j;
    double v;
  };
  std::vector<Entry> entries;
  Eigen::Index dim = 0;
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    const auto& row = t.rows[k];
    if (row.size() != 3) throw FormatError("matrix line " + std::to_string(k) + " needs 3 fields");
    Entry e{parse_int<Eigen::Index>(row[0]), parse_int<Eigen::Index>(row[1]), parse_double(row[2])};
    if (e.i < 0 || e.j < 0) throw FormatError("matrix indices must be nonnegative");
    dim = std::max({dim, e.i + 1, e.j + 1});
    entries.push_back(e);
  }
  if (const auto it = t.meta.find("p"); it != t.meta.end()) {
    const auto declared = parse_int<Eigen::Index>(it->second);
    if (declared < dim) throw FormatError("matrix entry index exceeds declared p");
    dim = declared;
  }
  if (dim == 0) throw FormatError("matrix file has no entries");
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto& e : entries) X(e.i, e.j) = e.v;
  return X;
}

OperatorDescriptor OperatorDescriptor::of(const MeasurementOperator& op) {
  if (op.kind() != MeasurementOperator::Kind::SeedStreamedGaussian) {
    throw ParameterError("only seed-streamed operators have a descriptor");
  }
  OperatorDescriptor d;
  d.seed = op.row_stream().seed();
  d.stream = op.row_stream().stream();
  d.n = op.rows();
  d.p = op.cols();
  d.gamma = op.gamma();
  return d;
}

MeasurementOperator OperatorDescriptor::instantiate() const {
  if (kind != "seed-streamed-gaussian") throw FormatError("unknown operator kind '" + kind + "'");
  return MeasurementOperator::seed_streamed_gaussian(RngStream(seed, stream), n, p, gamma);
}

void write_operator_descriptor(std::ostream& out, const OperatorDescriptor& d) {
  out << "kind=" << d.kind << '\n'
      << "seed=" << d.seed << '\n'
      << "stream=" << d.stream << '\n'
      << "n=" << d.n << '\n'
      << "p=" << d.p << '\n'
      << "gamma=" << format_double(d.gamma) << '\n';
}

OperatorDescriptor read_operator_descriptor(std::istream& in) {
  OperatorDescriptor d;
  std::string line;
  std::map<std::string, std::string, std::less<>> kv;
  while (std::getline(in, line)) {
    const auto view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) throw FormatError("descriptor line lacks '=': " + std::string(view));
    kv.emplace(std::string(trim(view.substr(0, eq))), std::string(trim(view.substr(eq + 1))));
  }
  auto get = [&](std::string_view key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end()) throw FormatError("descriptor missing '" + std::string(key) + "'");
    return it->second;
  };
  d.kind = get("kind");
  if (d.kind != "seed-streamed-gaussian") throw FormatError("unknown operator kind '" + d.kind + "'");
  d.seed = parse_int<std::uint64_t>(get("seed"));
  d.stream = parse_int<std::uint64_t>(get("stream"));
  d.n = parse_int<Eigen::Index>(get("n"));
  d.p = parse_int<Eigen::Index>(get("p"));
  d.gamma = parse_double(get("gamma"));
  return d;
}

}  // namespace sparsest
