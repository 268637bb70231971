#include "output.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace survgame::cli {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

json jnum(double v) {
  if (!std::isfinite(v)) return nullptr;
  return std::stod(num(v));
}

std::ofstream open_output(const std::filesystem::path& p) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

void write_json(const std::filesystem::path& p, const json& doc) {
  std::ofstream out = open_output(p);
  out << doc.dump(2) << '\n';
}

Svg::Svg(double half_extent, double cx, double cy, int pixels)
    : scale_(0.5 * pixels / (half_extent * 1.05)), cx_(cx), cy_(cy),
      pixels_(pixels) {}

double Svg::px(double x) const { return 0.5 * pixels_ + (x - cx_) * scale_; }
double Svg::py(double y) const { return 0.5 * pixels_ - (y - cy_) * scale_; }

void Svg::circle(double x, double y, double r, const std::string& style) {
  body_ += "<circle cx=\"" + num(px(x)) + "\" cy=\"" + num(py(y)) + "\" r=\"" +
           num(r * scale_) + "\" style=\"" + style + "\"/>\n";
}

void Svg::polyline(const std::vector<std::pair<double, double>>& pts,
                   const std::string& style) {
  if (pts.size() < 2) return;
  body_ += "<polyline fill=\"none\" style=\"" + style + "\" points=\"";
  char buf[64];
  for (const auto& [x, y] : pts) {
    std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(x), py(y));
    body_ += buf;
  }
  body_ += "\"/>\n";
}

void Svg::line(double x0, double y0, double x1, double y1,
               const std::string& style) {
  body_ += "<line x1=\"" + num(px(x0)) + "\" y1=\"" + num(py(y0)) + "\" x2=\"" +
           num(px(x1)) + "\" y2=\"" + num(py(y1)) + "\" style=\"" + style +
           "\"/>\n";
}

void Svg::rect(double x, double y, double w, double h, const std::string& style) {
  body_ += "<rect x=\"" + num(px(x)) + "\" y=\"" + num(py(y + h)) +
           "\" width=\"" + num(w * scale_) + "\" height=\"" + num(h * scale_) +
           "\" style=\"" + style + "\"/>\n";
}

void Svg::text(double x, double y, const std::string& s, int size) {
  body_ += "<text x=\"" + num(px(x)) + "\" y=\"" + num(py(y)) +
           "\" font-family=\"sans-serif\" font-size=\"" + std::to_string(size) +
           "\">" + s + "</text>\n";
}

void Svg::save(const std::filesystem::path& p) const {
  std::ofstream out = open_output(p);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << pixels_
      << "\" height=\"" << pixels_ << "\" viewBox=\"0 0 " << pixels_ << ' '
      << pixels_ << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << body_ << "</svg>\n";
}

}  // namespace survgame::cli
