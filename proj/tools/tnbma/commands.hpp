#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tnbma::cli {

struct CommonArgs {
  std::string archive_path;
  std::string groups = "two-group";  // preset name or spec file path
  std::string variant = "full-ml";
  int training_days = 28;
  std::vector<double> levels_percent = {66.7, 90.0};
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  int jobs = 0;
  std::string date;  // fit: restrict to one verification date
};

struct PredictArgs {
  std::string archive_path;
  std::string model_path;
  std::string date;
  std::vector<double> levels_percent = {66.7, 90.0};
  std::string out_dir = ".";
};

struct SimulateArgs {
  std::string config_path;
  std::string out_path;
  std::string groups;  // optional override
  int stations = 0;    // 0 = keep config value
  int days = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

int cmd_fit(const CommonArgs& args);
int cmd_verify(const CommonArgs& args);
int cmd_predict(const PredictArgs& args);
int cmd_simulate(const SimulateArgs& args);

}  // namespace tnbma::cli
