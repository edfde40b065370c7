#include <gtest/gtest.h>

#include <sstream>

#include "bsf/common.hpp"
#include "bsf/io.hpp"

using namespace bsf;

TEST(EuclideanCsv, HeaderOptional) {
  std::istringstream with("x,y\n1,2\n3,4.5\n");
  std::istringstream without("1,2\n3,4.5\n\n");
  const Dataset a = parse_euclidean_csv(with);
  const Dataset b = parse_euclidean_csv(without);
  ASSERT_EQ(a.size(), 2);
  EXPECT_EQ(a.dim(), 2);
  EXPECT_EQ(std::get<Eigen::VectorXd>(a[1])[1], 4.5);
  EXPECT_EQ(std::get<Eigen::VectorXd>(b[1])[1], 4.5);
}

TEST(EuclideanCsv, Errors) {
  std::istringstream ragged("1,2\n3\n");
  EXPECT_THROW(parse_euclidean_csv(ragged), IngestionError);
  std::istringstream bad("1,2\n3,abc\n");
  EXPECT_THROW(parse_euclidean_csv(bad), IngestionError);
  std::istringstream empty("x\n");
  EXPECT_THROW(parse_euclidean_csv(empty), IngestionError);
  std::istringstream nan("1,nan\n");
  EXPECT_THROW(parse_euclidean_csv(nan), IngestionError);
  EXPECT_THROW(read_euclidean_csv("/nonexistent/file.csv"), IngestionError);
}

TEST(EuclideanCsv, RoundTripIsExact) {
  std::vector<Eigen::VectorXd> pts{Eigen::Vector2d(0.1, 1.0 / 3.0), Eigen::Vector2d(-2e-300, 12345.678901234567)};
  std::ostringstream out;
  write_euclidean_csv(out, Dataset::euclidean(pts));
  std::istringstream in(out.str());
  const Dataset back = parse_euclidean_csv(in);
  for (int i = 0; i < 2; ++i) EXPECT_EQ(std::get<Eigen::VectorXd>(back[i]), pts[i]);
}

TEST(MatrixStack, RoundTripAndValidation) {
  std::istringstream in("m=2 count=2\n2 0.5\n0.5 1\n1 0\n0 3\n");
  const Dataset d = parse_matrix_stack(in, PayloadKind::spd);
  ASSERT_EQ(d.size(), 2);
  EXPECT_EQ(std::get<SpdMatrix>(d[1]).matrix()(1, 1), 3.0);
  std::ostringstream out;
  write_matrix_stack(out, d);
  std::istringstream again(out.str());
  const Dataset d2 = parse_matrix_stack(again, PayloadKind::spd);
  EXPECT_EQ(std::get<SpdMatrix>(d2[0]).matrix(), std::get<SpdMatrix>(d[0]).matrix());

  std::istringstream short_stack("m=2 count=2\n1 0 0 1\n");
  EXPECT_THROW(parse_matrix_stack(short_stack, PayloadKind::spd), IngestionError);
  std::istringstream bad_header("2 2\n1 0 0 1\n");
  EXPECT_THROW(parse_matrix_stack(bad_header, PayloadKind::spd), IngestionError);
  std::istringstream not_spd("m=2 count=1\n1 2 2 1\n");
  EXPECT_THROW(parse_matrix_stack(not_spd, PayloadKind::spd), IngestionError);
  std::istringstream lap("m=2 count=1\n1 -1 -1 1\n");
  EXPECT_EQ(parse_matrix_stack(lap, PayloadKind::graph_laplacian).kind(), PayloadKind::graph_laplacian);
  std::istringstream not_lap("m=2 count=1\n1 -1 -1 2\n");
  EXPECT_THROW(parse_matrix_stack(not_lap, PayloadKind::graph_laplacian), IngestionError);
}

TEST(PosteriorCsv, HeaderAndQuotedPartitions) {
  PosteriorTable t;
  t.entries.push_back({Partition::parse("0,0"), 1, -1.5, 0.9});
  t.entries.push_back({Partition::parse("0,1"), 2, -3.25, 0.1});
  std::ostringstream out;
  write_posterior_csv(out, t);
  EXPECT_EQ(out.str(),
            "partition_rgs,K,log_weight,probability\n"
            "\"0,0\",1,-1.5,0.90000000000000002\n"
            "\"0,1\",2,-3.25,0.10000000000000001\n");
}

TEST(LemmaTable, FixedFormat) {
  std::ostringstream out;
  write_lemma_table(out, {LemmaReport{"eigen_shift", 10, 1e-15, true, 3, 1e-9}});
  EXPECT_NE(out.str().find("eigen_shift"), std::string::npos);
  EXPECT_NE(out.str().find("PASS"), std::string::npos);
}
