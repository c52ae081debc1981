#ifndef PFC_CONSTANTS_HPP
#define PFC_CONSTANTS_HPP

namespace pfc {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

// SI values (2019 redefinition where exact)
inline constexpr double k_boltzmann = 1.380649e-23;       // J/K
inline constexpr double h_planck = 6.62607015e-34;        // J s
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg
inline constexpr double speed_of_light = 299792458.0;     // m/s

}  // namespace pfc

#endif
