#ifndef SLSPEC_JSON_IO_HPP
#define SLSPEC_JSON_IO_HPP

#include <optional>
#include <string>
#include <vector>

#include "slspec/types.hpp"

namespace slspec {

/// On-disk spectrum record; absent fields stay empty / nullopt depending
/// on which problem variant produced the file.
struct SpectrumData {
    std::vector<double> gamma, alpha, beta;
    std::vector<double> lambda, lambda_plus;
    std::vector<double> mu, nu;
    std::vector<int> omega, eps, eta;
    std::optional<double> a, b, h;
};

/// Potential file: {"M": int, "values": [reals], "symmetric": bool};
/// the grid is implicitly uniform on [0, pi].
Potential load_potential(const std::string& path);
void save_potential(const Potential& q, const std::string& path);

Potential potential_from_json_text(const std::string& text);
std::string potential_to_json_text(const Potential& q);

SpectrumData load_spectrum(const std::string& path);
void save_spectrum(const SpectrumData& s, const std::string& path);

SpectrumData spectrum_from_json_text(const std::string& text);
std::string spectrum_to_json_text(const SpectrumData& s);

}  // namespace slspec

#endif
