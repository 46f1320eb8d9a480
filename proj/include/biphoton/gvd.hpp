#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace biphoton {

struct GvdRow {
  double lambda_nm;     // vacuum wavelength
  double d_ps_nm_km;    // datasheet D at that wavelength
};

// Tabulated group-velocity dispersion, as found on fiber datasheets.
// Wavelengths must be strictly increasing and there must be at least four
// rows (the cubic interpolation downstream needs them).
class GvdTable {
 public:
  GvdTable(std::vector<GvdRow> rows, std::string source_label);

  const std::vector<GvdRow>& rows() const { return rows_; }
  const std::string& source_label() const { return label_; }

  // CSV format: header `wavelength_nm,D_ps_nm_km`, `#` comment lines, strict
  // numeric rows. Malformed content is an error with a line number.
  static GvdTable from_csv(const std::filesystem::path& path);
  void to_csv(const std::filesystem::path& path) const;

 private:
  std::vector<GvdRow> rows_;
  std::string label_;
};

}  // namespace biphoton
