#include "fmmsl/error.hpp"
#include "fmmsl/io.hpp"

#include "support/fixtures.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

using namespace fmmsl;
using fixtures::vec;

namespace {

std::string to_crlf(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '\n') out += '\r';
    out += c;
  }
  return out;
}

FitReport fitted_report(std::size_t n = 300) {
  const SimulatedData sim = simulate_mixture(fixtures::two_component_design(), n, 77);
  Dataset ds;
  ds.columns = {"x1", "x2"};
  ds.data = sim.data;
  ds.source = "memory";
  EmConfig cfg;
  cfg.restarts = 2;
  cfg.seed = 12345678901234567890ULL;
  return make_report(fit(ds.data, cfg), ds, cfg);
}

}  // namespace

TEST(ParseDataset, LineEndingsAndLabelColumn) {
  const std::string lf = "a,b,label\n1.5,2,1\n-3e-2,4.25,2\n\n";
  const Dataset x = parse_dataset(lf, {});
  const Dataset y = parse_dataset(to_crlf(lf), {});
  EXPECT_EQ(x.columns, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(x.data, y.data);
  EXPECT_EQ(x.labels, (std::vector<int>{1, 2}));
  EXPECT_EQ(y.labels, x.labels);
  EXPECT_DOUBLE_EQ(x.data(1, 0), -0.03);

  const Dataset no_label = parse_dataset("a,b\n1.5,2\n-3e-2,4.25\n", {});
  EXPECT_EQ(no_label.data, x.data);
  EXPECT_TRUE(no_label.labels.empty());
}

TEST(ParseDataset, DelimitersQuotesAndSelection) {
  const Dataset tab = parse_dataset("\"Length\"\tRight\tDiagonal\n214.8\t130.5\t141.0\n214.6\t129.7\t141.7\n",
                                    {"Right", "Diagonal"});
  EXPECT_EQ(tab.columns, (std::vector<std::string>{"Right", "Diagonal"}));
  EXPECT_DOUBLE_EQ(tab.data(1, 0), 129.7);
  EXPECT_DOUBLE_EQ(tab.data(0, 1), 141.0);

  const Dataset space = parse_dataset("x  y\n 1  2\n3 4\n", {"y"});
  EXPECT_EQ(space.data.cols(), 1);
  EXPECT_DOUBLE_EQ(space.data(1, 0), 4.0);

  const Dataset semi = parse_dataset("x;y\n1;2\n", {});
  EXPECT_DOUBLE_EQ(semi.data(0, 1), 2.0);
}

TEST(ParseDataset, Errors) {
  EXPECT_THROW(parse_dataset("", {}), DataError);
  EXPECT_THROW(parse_dataset("a,b\n", {}), DataError);
  EXPECT_THROW(parse_dataset("a,b\n1,2\n", {"c"}), DataError);
  EXPECT_THROW(parse_dataset("a,b\n1,2,3\n", {}), DataError);
  try {
    parse_dataset("a,b\n1,2\n3,oops\n", {});
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("'b'"), std::string::npos) << msg;
    EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
  }
  EXPECT_THROW(read_dataset("/nonexistent/file.csv", {}), DataError);
}

TEST(ColumnList, Splits) {
  EXPECT_EQ(split_column_list(" Right , Diagonal"), (std::vector<std::string>{"Right", "Diagonal"}));
  EXPECT_TRUE(split_column_list("").empty());
}

TEST(ParamsJson, RoundTripAndSchemaPaths) {
  const MixtureParams m = fixtures::two_component_design();
  const MixtureParams back = params_from_json(Json::parse(params_to_json(m).dump()));
  EXPECT_EQ(flatten_parameters(back), flatten_parameters(m));

  Json bad = params_to_json(m);
  bad["components"][1]["sigma"][0] = Json::array({1.0});
  try {
    params_from_json(bad);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("/components/1/sigma/0"), std::string::npos) << e.what();
  }
  Json missing = params_to_json(m);
  missing["components"][0].erase("gamma");
  try {
    params_from_json(missing);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("/components/0/gamma"), std::string::npos) << e.what();
  }
  Json weights = params_to_json(m);
  weights["weights"] = Json::array({0.5, 0.6});
  EXPECT_THROW(params_from_json(weights), DataError);
  Json text = params_to_json(m);
  text["components"][0]["mu"][1] = "two";
  EXPECT_THROW(params_from_json(text), DataError);
}

TEST(FitReportJson, LosslessRoundTrip) {
  const FitReport r = fitted_report();
  const std::string first = report_to_json(r).dump(2);
  const FitReport back = report_from_json(Json::parse(first));
  EXPECT_EQ(report_to_json(back).dump(2), first);
  EXPECT_EQ(flatten_parameters(back.parameters), flatten_parameters(r.parameters));
  EXPECT_EQ(back.loglik, r.loglik);
  EXPECT_EQ(back.loglik_trace, r.loglik_trace);
  EXPECT_EQ(back.config.seed, 12345678901234567890ULL);
  ASSERT_TRUE(back.se.has_value());
  EXPECT_EQ(*back.se, *r.se);
  EXPECT_EQ(back.labels, r.labels);
  EXPECT_EQ(back.se_names.size(), 15u);
}

TEST(FitReportJson, FileRoundTripAndFormatCheck) {
  const FitReport r = fitted_report();
  const auto path = std::filesystem::temp_directory_path() / "fmmsl_report_roundtrip.json";
  write_report(path, r);
  const FitReport back = read_report(path);
  EXPECT_EQ(report_to_json(back).dump(), report_to_json(r).dump());
  EXPECT_EQ(flatten_parameters(read_params_file(path)), flatten_parameters(r.parameters));
  Json j = report_to_json(r);
  j["format"] = "something-else";
  EXPECT_THROW(report_from_json(j), DataError);
  std::filesystem::remove(path);
}

TEST(FitReport, SummaryMentionsCriteria) {
  const std::string s = format_fit_summary(fitted_report());
  EXPECT_NE(s.find("loglik"), std::string::npos);
  EXPECT_NE(s.find("AIC"), std::string::npos);
  EXPECT_NE(s.find("BIC"), std::string::npos);
  EXPECT_NE(s.find("gamma[2]"), std::string::npos);
}

TEST(StudyConfigJson, ParsesAndValidates) {
  Json j;
  j["theta_true"] = params_to_json(fixtures::two_component_design());
  j["sample_sizes"] = {500, 1000};
  j["replicates"] = 3;
  j["seed"] = 9;
  j["em"] = {{"restarts", 4}, {"tol", 1e-7}};
  const StudyConfig c = study_config_from_json(j);
  EXPECT_EQ(c.sample_sizes, (std::vector<std::size_t>{500, 1000}));
  EXPECT_EQ(c.replicates, 3u);
  EXPECT_EQ(c.em.restarts, 4);
  EXPECT_EQ(c.em.g, 2);
  EXPECT_DOUBLE_EQ(c.em.tol, 1e-7);

  Json bad = j;
  bad["replicates"] = 0;
  EXPECT_THROW(study_config_from_json(bad), DataError);
  bad = j;
  bad.erase("sample_sizes");
  EXPECT_THROW(study_config_from_json(bad), DataError);
  bad = j;
  bad["em"]["stop_rule"] = "never";
  EXPECT_THROW(study_config_from_json(bad), DataError);
}

TEST(StudyConfigJson, BundledConfigLoads) {
  const StudyConfig c = read_study_config(std::string(FMMSL_DATA_DIR) + "/simstudy_table1.json");
  EXPECT_EQ(c.sample_sizes, (std::vector<std::size_t>{500, 1000, 2000}));
  EXPECT_EQ(flatten_parameters(c.theta_true), flatten_parameters(fixtures::two_component_design()));
}

TEST(Tables, SimulatedCsvReparses) {
  const SimulatedData sim = simulate_mixture(fixtures::two_component_design(), 50, 5);
  std::ostringstream out;
  write_simulated_csv(out, sim);
  const Dataset back = parse_dataset(out.str(), {});
  EXPECT_EQ(back.data, sim.data);
  EXPECT_EQ(back.labels, sim.labels);
}

TEST(Tables, StudyTableLayout) {
  SimStudySummary s;
  SizeSummary z;
  z.n = 10;
  z.used = 1;
  z.weights.push_back({1, 0.6, 0.61, 0.0001});
  z.blocks.push_back({1, "sigma", vec({1.5, 0.0, 1.5}), vec({1.4, 0.1, 1.6}), 0.17});
  s.sizes.push_back(z);
  std::ostringstream out;
  write_study_table(out, s);
  std::istringstream lines(out.str());
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "n,component,parameter,true,mean,distance,used,failures");
  std::getline(lines, line);
  EXPECT_EQ(line, "10,1,pi,0.6,0.61,0.0001,1,0");
  std::getline(lines, line);
  EXPECT_EQ(line, "10,1,sigma[1,1],1.5,1.4,0.17,1,0");
  std::getline(lines, line);
  EXPECT_EQ(line, "10,1,sigma[2,1],0,0.1,0.17,1,0");
}

TEST(Contour, GridOfTwoHitsCorners) {
  const FitReport r = fitted_report();
  const auto pts = contour_grid(r, 2, 0.0);
  ASSERT_EQ(pts.size(), 4u);
  EXPECT_DOUBLE_EQ(pts[0].x, r.data_min(0));
  EXPECT_DOUBLE_EQ(pts[0].y, r.data_min(1));
  EXPECT_DOUBLE_EQ(pts[3].x, r.data_max(0));
  EXPECT_DOUBLE_EQ(pts[3].y, r.data_max(1));
  for (const auto& p : pts) {
    EXPECT_NEAR(p.density, std::exp(mixture_logpdf(vec({p.x, p.y}), r.parameters)), 1e-15);
  }
}

TEST(Contour, RiemannSumNearOne) {
  const FitReport r = fitted_report();
  const int grid = 300;
  const double margin = 1.0;
  const auto pts = contour_grid(r, grid, margin);
  double total = 0.0;
  for (const auto& p : pts) {
    EXPECT_GT(p.density, 0.0);
    total += p.density;
  }
  const double dx = (pts.back().x - pts.front().x) / (grid - 1);
  const double dy = (pts.back().y - pts.front().y) / (grid - 1);
  EXPECT_NEAR(total * dx * dy, 1.0, 0.1);
}

TEST(Contour, RejectsOtherDimensions) {
  FitReport r = fitted_report();
  r.p = 3;
  EXPECT_THROW(contour_grid(r, 10, 0.1), DataError);
  r.p = 2;
  EXPECT_THROW(contour_grid(r, 1, 0.1), UsageError);
}
