#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "lohe/observe.hpp"
#include "lohe/verify.hpp"

namespace lohe {

/// 17 significant digits; round-trips every double.
std::string format_double(double x);

/// t, rho, diam_euclid, diam_corr, lyapunov, [potential,] norm_drift, then
/// cr_i_j_k_l_re / cr_i_j_k_l_im per tuple.
std::vector<std::string> csv_header(std::span<const std::array<std::size_t, 4>> tuples,
                                    bool with_potential);

void write_csv(std::ostream& out, std::span<const ObservableRecord> rows,
               std::span<const std::array<std::size_t, 4>> tuples);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  /// Throws InvalidInput when the column is absent.
  std::vector<double> column(const std::string& name) const;
};

CsvTable read_csv(std::istream& in);
/// Inverse of write_csv.
std::vector<ObservableRecord> records_from_csv(const CsvTable& table);

std::string report_to_json(const VerificationReport& report);

}  // namespace lohe
