#include "biphoton/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace biphoton {

namespace {

struct Rgb {
  double r, g, b;
};

// five-anchor dark-violet to yellow ramp, linearly interpolated
Rgb ramp(double t) {
  static constexpr std::array<Rgb, 5> anchors{{{68, 1, 84},
                                               {59, 82, 139},
                                               {33, 145, 140},
                                               {94, 201, 98},
                                               {253, 231, 37}}};
  t = std::clamp(t, 0.0, 1.0);
  const double x = t * (anchors.size() - 1);
  const auto lo = static_cast<std::size_t>(std::min<double>(x, anchors.size() - 2));
  const double f = x - static_cast<double>(lo);
  const Rgb& a = anchors[lo];
  const Rgb& b = anchors[lo + 1];
  return {a.r + f * (b.r - a.r), a.g + f * (b.g - a.g), a.b + f * (b.b - a.b)};
}

std::string color(double t) {
  const Rgb c = ramp(t);
  std::ostringstream s;
  s << "rgb(" << static_cast<int>(std::lround(c.r)) << "," << static_cast<int>(std::lround(c.g))
    << "," << static_cast<int>(std::lround(c.b)) << ")";
  return s.str();
}

std::string num(double v, int prec = 1) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(prec) << v;
  return s.str();
}

}  // namespace

void spectral_map_to_svg(const SpectralDensityMap& map, const std::filesystem::path& path,
                         const std::string& title) {
  if (map.lambda_p_axis_nm.empty() || map.lambda_axis_nm.empty())
    throw std::invalid_argument("spectral_map_to_svg: empty map");

  const std::size_t np = map.lambda_p_axis_nm.size();
  const std::size_t ns = map.lambda_axis_nm.size();
  const double plot_w = 720.0, plot_h = 540.0;
  const double ml = 70.0, mt = title.empty() ? 20.0 : 44.0, mr = 20.0, mb = 56.0;
  const double width = ml + plot_w + mr;
  const double height = mt + plot_h + mb;
  const double cw = plot_w / static_cast<double>(np);
  const double ch = plot_h / static_cast<double>(ns);

  double peak = 0.0;
  for (double v : map.values) peak = std::max(peak, v);

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  out << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  if (!title.empty())
    out << "<text x=\"" << ml + plot_w / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";

  // cells; signal wavelength increases upward
  out << std::fixed << std::setprecision(2);
  for (std::size_t ip = 0; ip < np; ++ip) {
    for (std::size_t is = 0; is < ns; ++is) {
      const double v = map.at(ip, is);
      const double t = peak > 0.0 ? v / peak : 0.0;
      const double x = ml + static_cast<double>(ip) * cw;
      const double y = mt + plot_h - static_cast<double>(is + 1) * ch;
      out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cw + 0.5 << "\" height=\""
          << ch + 0.5 << "\" fill=\"" << color(t) << "\"/>\n";
    }
  }
  out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << plot_w << "\" height=\""
      << plot_h << "\" fill=\"none\" stroke=\"black\"/>\n";

  // ticks: five per axis at the nearest grid nodes
  const int nticks = 5;
  for (int k = 0; k < nticks; ++k) {
    const std::size_t ip = (np - 1) * static_cast<std::size_t>(k) / (nticks - 1);
    const double x = ml + (static_cast<double>(ip) + 0.5) * cw;
    out << "<line x1=\"" << x << "\" y1=\"" << mt + plot_h << "\" x2=\"" << x << "\" y2=\""
        << mt + plot_h + 6 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << x << "\" y=\"" << mt + plot_h + 22
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
        << num(map.lambda_p_axis_nm[ip]) << "</text>\n";
    const std::size_t is = (ns - 1) * static_cast<std::size_t>(k) / (nticks - 1);
    const double y = mt + plot_h - (static_cast<double>(is) + 0.5) * ch;
    out << "<line x1=\"" << ml - 6 << "\" y1=\"" << y << "\" x2=\"" << ml << "\" y2=\"" << y
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << ml - 10 << "\" y=\"" << y + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">"
        << num(map.lambda_axis_nm[is]) << "</text>\n";
  }
  out << "<text x=\"" << ml + plot_w / 2 << "\" y=\"" << height - 14
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">pump wavelength "
         "(nm)</text>\n";
  out << "<text x=\"16\" y=\"" << mt + plot_h / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
         "transform=\"rotate(-90 16 "
      << mt + plot_h / 2 << ")\">signal/idler wavelength (nm)</text>\n";
  out << "</svg>\n";
}

}  // namespace biphoton
