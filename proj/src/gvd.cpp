#include "biphoton/gvd.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "biphoton/detail/text.hpp"
#include "biphoton/errors.hpp"

namespace biphoton {

GvdTable::GvdTable(std::vector<GvdRow> rows, std::string source_label)
    : rows_(std::move(rows)), label_(std::move(source_label)) {
  if (rows_.size() < 4)
    throw std::invalid_argument("GVD table needs at least 4 rows, got " +
                                std::to_string(rows_.size()));
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (!(rows_[i].lambda_nm > 0.0) || !std::isfinite(rows_[i].d_ps_nm_km))
      throw std::invalid_argument("GVD table row " + std::to_string(i) +
                                  " has a non-positive wavelength or non-finite D");
    if (i > 0 && !(rows_[i - 1].lambda_nm < rows_[i].lambda_nm))
      throw std::invalid_argument("GVD table wavelengths must be strictly increasing (row " +
                                  std::to_string(i) + ")");
  }
}

GvdTable GvdTable::from_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open GVD file: " + path.string());
  const std::string fname = path.string();

  std::vector<GvdRow> rows;
  std::string line;
  int line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (!saw_header) {
      if (t != "wavelength_nm,D_ps_nm_km")
        throw ParseError(fname + ":" + std::to_string(line_no) +
                         ": expected header 'wavelength_nm,D_ps_nm_km'");
      saw_header = true;
      continue;
    }
    const auto fields = detail::split_csv(t);
    if (fields.size() != 2)
      throw ParseError(fname + ":" + std::to_string(line_no) + ": expected 2 fields, got " +
                       std::to_string(fields.size()));
    rows.push_back({detail::parse_double(fields[0], fname, line_no),
                    detail::parse_double(fields[1], fname, line_no)});
  }
  if (!saw_header) throw ParseError(fname + ": missing header line");
  try {
    return GvdTable(std::move(rows), fname);
  } catch (const std::invalid_argument& e) {
    throw ParseError(fname + ": " + e.what());
  }
}

void GvdTable::to_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write GVD file: " + path.string());
  out << "# " << label_ << "\n";
  out << "wavelength_nm,D_ps_nm_km\n";
  out.precision(17);
  for (const auto& r : rows_) out << r.lambda_nm << "," << r.d_ps_nm_km << "\n";
}

}  // namespace biphoton
