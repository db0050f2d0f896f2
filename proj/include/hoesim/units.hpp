#pragma once

#include <numbers>

namespace hoesim {

inline constexpr double kPi = std::numbers::pi;

// Boundary unit conversions. Configuration files use centimetres for
// lengths and nanometres for wavelengths (the units of the design tables);
// everything internal is metres and radians. The conversion happens once,
// at parse time.
inline constexpr double cm_to_m(double cm) { return cm * 1e-2; }
inline constexpr double m_to_cm(double m) { return m * 1e2; }
inline constexpr double mm_to_m(double mm) { return mm * 1e-3; }
inline constexpr double m_to_mm(double m) { return m * 1e3; }
inline constexpr double um_to_m(double um) { return um * 1e-6; }
inline constexpr double nm_to_m(double nm) { return nm * 1e-9; }
inline constexpr double m_to_nm(double m) { return m * 1e9; }

inline constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

// Vacuum wave number k = 2*pi/lambda.
inline constexpr double wave_number(double lambda_m) { return 2.0 * kPi / lambda_m; }

} // namespace hoesim
