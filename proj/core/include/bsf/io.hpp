#pragma once

// Dataset ingestion and CSV reporting. Floats are written with 17 significant digits.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "bsf/dataset.hpp"
#include "bsf/experiments.hpp"
#include "bsf/posterior.hpp"
#include "bsf/sampler.hpp"
#include "bsf/theory_check.hpp"

namespace bsf {

/// One row per point, p numeric columns; a non-numeric first row is taken as a header.
Dataset parse_euclidean_csv(std::istream& in);
Dataset read_euclidean_csv(const std::filesystem::path& path);
void write_euclidean_csv(std::ostream& out, const Dataset& data);

/// Header line `m=<int> count=<int>`, then count m x m matrices as whitespace-separated numbers.
Dataset parse_matrix_stack(std::istream& in, PayloadKind kind);
Dataset read_matrix_stack(const std::filesystem::path& path, PayloadKind kind);
void write_matrix_stack(std::ostream& out, const Dataset& data);

Dataset read_dataset(const std::filesystem::path& path, PayloadKind kind);
void write_dataset(std::ostream& out, const Dataset& data);

void write_posterior_csv(std::ostream& out, const PosteriorTable& table);
void write_k_marginal_csv(std::ostream& out, const std::vector<double>& k_marginal);
void write_coclustering_csv(std::ostream& out, const Eigen::MatrixXd& co);
void write_k_histogram_csv(std::ostream& out, const ChainSummary& summary);
void write_samples_csv(std::ostream& out, const ChainSummary& summary);

void write_consistency_rows_csv(std::ostream& out, const std::vector<ConsistencyRow>& rows);
void write_consistency_aggregates_csv(std::ostream& out, const std::vector<ConsistencyAggregate>& rows);
void write_misclass_rows_csv(std::ostream& out, const std::vector<MisclassRow>& rows);
void write_misclass_aggregates_csv(std::ostream& out, const std::vector<MisclassAggregate>& rows);

/// Fixed-width table: id, trials, max violation, PASS/FAIL.
void write_lemma_table(std::ostream& out, const std::vector<LemmaReport>& reports);

/// Writes `content` to `path` in one go, creating parent directories.
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace bsf
