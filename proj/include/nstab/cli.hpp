#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace nstab::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// "name:key=value,key=value"; the part after ':' is optional.
struct Descriptor {
  std::string name;
  std::map<std::string, std::string> params;

  double number(const std::string& key, double fallback) const;
  int integer(const std::string& key, int fallback) const;
  std::string text(const std::string& key, const std::string& fallback) const;
};

Descriptor parse_descriptor(const std::string& text);

// "log:a:b:n", "lin:a:b:n" or a comma-separated list.
std::vector<double> parse_grid(const std::string& text);

struct RunConfig {
  std::string command;
  std::string model;
  std::vector<std::string> functions;
  std::string bound = "T1.6";
  std::string grid;
  std::uint64_t seed = 1;
  std::string out;
  std::string csv;
  std::size_t mc = 0;
  double r = 1.0;
  double rho = 0.0;
  double lambda = 0.0;
  double c = 1.0;
  double constant = 7.0;
  double c2 = 0.25;
  std::string clock;
  double t = 0.3;
  double eta = 0.25;
  double epsilon = 0.0;
  int quad_order = 0;
};

// Entry point of the command-line tool; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nstab::cli
