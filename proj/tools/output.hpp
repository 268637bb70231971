#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "survgame/game_core.hpp"

namespace survgame::cli {

using nlohmann::json;

// Fixed 12-significant-digit rendering shared by every output file.
std::string num(double v);
json jnum(double v);

std::ofstream open_output(const std::filesystem::path& p);
void write_json(const std::filesystem::path& p, const json& doc);

// Minimal SVG canvas in reduced/world metres, y pointing up.
class Svg {
 public:
  Svg(double half_extent, double cx = 0.0, double cy = 0.0, int pixels = 800);

  void circle(double x, double y, double r, const std::string& style);
  void polyline(const std::vector<std::pair<double, double>>& pts,
                const std::string& style);
  void line(double x0, double y0, double x1, double y1, const std::string& style);
  void rect(double x, double y, double w, double h, const std::string& style);
  void text(double x, double y, const std::string& s, int size = 14);
  void save(const std::filesystem::path& p) const;

 private:
  double px(double x) const;
  double py(double y) const;

  double scale_;
  double cx_;
  double cy_;
  int pixels_;
  std::string body_;
};

}  // namespace survgame::cli
