#include "bsf/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bsf/common.hpp"

namespace bsf {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_number(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open " + path.string());
  return in;
}

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

}  // namespace

Dataset parse_euclidean_csv(std::istream& in) {
  std::vector<Eigen::VectorXd> points;
  std::string line;
  int line_no = 0;
  std::size_t cols = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_commas(line);
    std::vector<double> values(fields.size());
    bool numeric = true;
    for (std::size_t j = 0; j < fields.size() && numeric; ++j) numeric = parse_number(fields[j], values[j]);
    if (!numeric) {
      if (points.empty() && cols == 0) {
        cols = fields.size();  // header
        continue;
      }
      throw IngestionError("non-numeric value on line " + std::to_string(line_no));
    }
    if (cols == 0) cols = fields.size();
    if (fields.size() != cols) {
      throw IngestionError("line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                           " columns, expected " + std::to_string(cols));
    }
    for (double v : values) {
      if (!std::isfinite(v)) throw IngestionError("non-finite value on line " + std::to_string(line_no));
    }
    points.push_back(Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size())));
  }
  if (points.empty()) throw IngestionError("no data rows");
  return Dataset::euclidean(std::move(points));
}

Dataset read_euclidean_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_euclidean_csv(in);
}

void write_euclidean_csv(std::ostream& out, const Dataset& data) {
  if (data.kind() != PayloadKind::euclidean) throw InvalidArgument("dataset is not euclidean");
  for (int j = 0; j < data.dim(); ++j) out << (j ? ",x" : "x") << j;
  out << '\n';
  for (const auto& p : data.points()) {
    const auto& v = std::get<Eigen::VectorXd>(p);
    for (int j = 0; j < v.size(); ++j) out << (j ? "," : "") << format_double(v[j]);
    out << '\n';
  }
}

Dataset parse_matrix_stack(std::istream& in, PayloadKind kind) {
  if (kind == PayloadKind::euclidean) throw InvalidArgument("matrix stack needs a matrix payload kind");
  std::string header;
  if (!std::getline(in, header)) throw IngestionError("empty matrix stack");
  int m = 0;
  int count = 0;
  char tail = 0;
  if (std::sscanf(header.c_str(), " m=%d count=%d %c", &m, &count, &tail) != 2 || m < 1 || count < 1) {
    throw IngestionError("bad matrix stack header '" + header + "', expected 'm=<int> count=<int>'");
  }
  std::vector<Eigen::MatrixXd> mats;
  mats.reserve(static_cast<std::size_t>(count));
  std::string token;
  for (int c = 0; c < count; ++c) {
    Eigen::MatrixXd mat(m, m);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        double v = 0.0;
        if (!(in >> token) || !parse_number(token, v) || !std::isfinite(v)) {
          throw IngestionError("matrix " + std::to_string(c) + ": missing or bad entry (" +
                               std::to_string(i) + "," + std::to_string(j) + ")");
        }
        mat(i, j) = v;
      }
    }
    mats.push_back(std::move(mat));
  }
  if (in >> token) throw IngestionError("trailing data after " + std::to_string(count) + " matrices");
  try {
    return kind == PayloadKind::spd ? Dataset::spd(std::move(mats)) : Dataset::graph_laplacians(std::move(mats));
  } catch (const InvalidArgument& e) {
    throw IngestionError(e.what());
  }
}

Dataset read_matrix_stack(const std::filesystem::path& path, PayloadKind kind) {
  auto in = open_input(path);
  return parse_matrix_stack(in, kind);
}

void write_matrix_stack(std::ostream& out, const Dataset& data) {
  if (data.kind() == PayloadKind::euclidean) throw InvalidArgument("dataset is not matrix-valued");
  out << "m=" << data.dim() << " count=" << data.size() << '\n';
  for (const auto& p : data.points()) {
    const Eigen::MatrixXd& mat = std::visit(
        [](const auto& x) -> const Eigen::MatrixXd& {
          if constexpr (std::is_same_v<std::decay_t<decltype(x)>, Eigen::VectorXd>) {
            throw InvalidArgument("mixed payload");
          } else {
            return x.matrix();
          }
        },
        p);
    for (int i = 0; i < mat.rows(); ++i) {
      for (int j = 0; j < mat.cols(); ++j) out << (j ? " " : "") << format_double(mat(i, j));
      out << '\n';
    }
  }
}

Dataset read_dataset(const std::filesystem::path& path, PayloadKind kind) {
  return kind == PayloadKind::euclidean ? read_euclidean_csv(path) : read_matrix_stack(path, kind);
}

void write_dataset(std::ostream& out, const Dataset& data) {
  if (data.kind() == PayloadKind::euclidean) {
    write_euclidean_csv(out, data);
  } else {
    write_matrix_stack(out, data);
  }
}

void write_posterior_csv(std::ostream& out, const PosteriorTable& table) {
  out << "partition_rgs,K,log_weight,probability\n";
  for (const auto& e : table.entries) {
    out << quoted(e.partition.to_string()) << ',' << e.num_blocks << ',' << format_double(e.log_weight) << ','
        << format_double(e.probability) << '\n';
  }
}

void write_k_marginal_csv(std::ostream& out, const std::vector<double>& k_marginal) {
  out << "K,probability\n";
  for (std::size_t k = 1; k < k_marginal.size(); ++k) out << k << ',' << format_double(k_marginal[k]) << '\n';
}

void write_coclustering_csv(std::ostream& out, const Eigen::MatrixXd& co) {
  for (int j = 0; j < co.cols(); ++j) out << (j ? ",p" : "p") << j;
  out << '\n';
  for (int i = 0; i < co.rows(); ++i) {
    for (int j = 0; j < co.cols(); ++j) out << (j ? "," : "") << format_double(co(i, j));
    out << '\n';
  }
}

void write_k_histogram_csv(std::ostream& out, const ChainSummary& summary) {
  out << "K,count,frequency\n";
  const auto& h = summary.k_histogram();
  const double total = static_cast<double>(summary.retained());
  for (std::size_t k = 1; k < h.size(); ++k) {
    out << k << ',' << h[k] << ',' << format_double(total > 0 ? h[k] / total : 0.0) << '\n';
  }
}

void write_samples_csv(std::ostream& out, const ChainSummary& summary) {
  out << "sample,partition_rgs,K\n";
  const auto& s = summary.samples();
  for (std::size_t i = 0; i < s.size(); ++i) {
    out << i << ',' << quoted(s[i].to_string()) << ',' << s[i].num_blocks() << '\n';
  }
}

void write_consistency_rows_csv(std::ostream& out, const std::vector<ConsistencyRow>& rows) {
  out << "n,replicate,seed,sigma2,log_delta_lambda,prob_truth,prob_k0,d_member,log_eps_over_gamma,map_k,"
         "map_hamming\n";
  for (const auto& r : rows) {
    out << r.n << ',' << r.replicate << ',' << r.seed << ',' << format_double(r.sigma2) << ','
        << format_double(r.log_delta_lambda) << ',' << format_double(r.prob_truth) << ','
        << format_double(r.prob_k0) << ',' << (r.d_member ? 1 : 0) << ',' << format_double(r.log_eps_over_gamma)
        << ',' << r.map_k << ',' << r.map_hamming << '\n';
  }
}

void write_consistency_aggregates_csv(std::ostream& out, const std::vector<ConsistencyAggregate>& rows) {
  out << "n,replicates,prob_truth_q1,prob_truth_median,prob_truth_q3,prob_k0_q1,prob_k0_median,prob_k0_q3,"
         "map_hamming_q1,map_hamming_median,map_hamming_q3,d_member_rate,map_exact_rate\n";
  auto q = [&](const Quartiles& x) {
    out << format_double(x.q1) << ',' << format_double(x.median) << ',' << format_double(x.q3) << ',';
  };
  for (const auto& r : rows) {
    out << r.n << ',' << r.replicates << ',';
    q(r.prob_truth);
    q(r.prob_k0);
    q(r.map_hamming);
    out << format_double(r.d_member_rate) << ',' << format_double(r.map_exact_rate) << '\n';
  }
}

void write_misclass_rows_csv(std::ostream& out, const std::vector<MisclassRow>& rows) {
  out << "snr,replicate,seed,sigma2,expected_hamming,log_lemma_bound,log_lemma_bound_gaussian,bound_below_n,"
         "within_bound\n";
  for (const auto& r : rows) {
    out << format_double(r.snr) << ',' << r.replicate << ',' << r.seed << ',' << format_double(r.sigma2) << ','
        << format_double(r.expected_hamming) << ',' << format_double(r.log_lemma_bound) << ','
        << format_double(r.log_lemma_bound_gaussian) << ',' << (r.bound_below_n ? 1 : 0) << ','
        << (r.within_bound ? 1 : 0) << '\n';
  }
}

void write_misclass_aggregates_csv(std::ostream& out, const std::vector<MisclassAggregate>& rows) {
  out << "snr,replicates,expected_hamming_q1,expected_hamming_median,expected_hamming_q3,log_theorem_bound,"
         "bound_applicable,bound_violations\n";
  for (const auto& r : rows) {
    out << format_double(r.snr) << ',' << r.replicates << ',' << format_double(r.expected_hamming.q1) << ','
        << format_double(r.expected_hamming.median) << ',' << format_double(r.expected_hamming.q3) << ','
        << format_double(r.log_theorem_bound) << ',' << r.bound_applicable << ',' << r.bound_violations << '\n';
  }
}

void write_lemma_table(std::ostream& out, const std::vector<LemmaReport>& reports) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-22s %8s %14s  %s\n", "lemma", "trials", "max_violation", "result");
  out << buf;
  for (const auto& r : reports) {
    std::snprintf(buf, sizeof buf, "%-22s %8d %14.6e  %s\n", r.id.c_str(), r.trials, r.max_violation,
                  r.pass ? "PASS" : "FAIL");
    out << buf;
  }
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace bsf
