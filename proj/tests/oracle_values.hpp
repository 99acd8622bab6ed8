#pragma once

// Frozen outputs of oracles/derive.py.
namespace oracle {

// Γ^k_ij(0.5, 0) u^i v^j for the Poincaré disk, u = (0.3, −0.7), v = (1.1, 0.4).
inline constexpr double kPoincareGamma[2] = {0.8133333333333332, -0.8666666666666666};

// Geodesic shooting from the origin: metric length needed to reach (r, 0).
inline constexpr double kPoincareLengthR05 = 1.0986122886681098;
inline constexpr double kPoincareLengthR08 = 2.1972245773362196;

inline constexpr unsigned long kSnapshotBytesN16K3 = 98328;

inline constexpr double kTorusMapEnergy = 19.739208802178716;
inline constexpr double kCliffordHalfTurn = 2.221441469079183;

}  // namespace oracle
