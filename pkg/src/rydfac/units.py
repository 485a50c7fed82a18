"""Unit conventions and physical constants.

All energies, rates and Rabi frequencies inside the package are angular
frequencies in rad/us.  Configuration files and most literature quote
ordinary frequencies (value/2pi), so the converters here multiply by 2pi.
Lengths are um, times us, temperatures uK.
"""
import math

TWO_PI = 2.0 * math.pi

# CODATA 2018
K_B = 1.380649e-23          # J/K (exact)
ATOMIC_MASS = 1.66053906660e-27  # kg
RB87_MASS = 86.909180531 * ATOMIC_MASS  # kg


def mhz(f):
    """Ordinary frequency in MHz -> angular frequency in rad/us."""
    return TWO_PI * f


def khz(f):
    """Ordinary frequency in kHz -> rad/us."""
    return TWO_PI * f * 1e-3


def ghz(f):
    """Ordinary frequency in GHz -> rad/us."""
    return TWO_PI * f * 1e3


def ghz_um6(c6):
    """van der Waals coefficient in GHz*um^6 -> rad/us * um^6."""
    return TWO_PI * c6 * 1e3


def to_mhz(omega):
    """Angular frequency in rad/us -> ordinary frequency in MHz."""
    return omega / TWO_PI


def thermal_sigma_um(temperature_uK, omega_trap, mass_kg):
    """RMS position spread per axis of a thermal atom in a harmonic trap.

    sqrt(k_B T / (m w^2)) with the trap frequency ``omega_trap`` given in
    rad/us.  Returns um.
    """
    if temperature_uK == 0.0:
        return 0.0
    omega_si = omega_trap * 1e6  # rad/s
    sigma_m = math.sqrt(K_B * temperature_uK * 1e-6 / mass_kg) / omega_si
    return sigma_m * 1e6
