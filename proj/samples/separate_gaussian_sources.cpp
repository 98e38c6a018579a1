// Separates three complex Gaussian sources with distinct circularity
// coefficients, mixed by a random matrix, using the strong-uncorrelating
// transform of the mixture.

#include "circica/circica.hpp"

#include <iostream>

int main() {
  using namespace circica;
  const Eigen::Index m = 3;
  const RealVector spectrum = gaussian_example_spectrum(m);  // 1/2, 1/3, 0
  const ComplexMatrix a = random_mixing(m, m, 7);
  const SampleMatrix x = a * sample(standard_model(spectrum), 100000, 11);

  const SeparationReport rep = separate_sut(x, m, {}, a);
  std::cout << "estimated spectrum: " << rep.spectrum.values.transpose() << "\n"
            << "distinct: " << std::boolalpha << rep.spectrum_distinct << "\n"
            << "quality index: " << rep.quality->index << "\n"
            << "gain |W A|:\n" << rep.gain->cwiseAbs() << "\n";
}
