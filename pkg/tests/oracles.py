"""Frozen reference values from scripts/compute_oracles.py.

Fixed-step RK4 (h = 1e-5) with bisection on the final step; independent
of the package's adaptive integrator and event locator.
"""

ORACLE = {
    'grim_z0_0.5_z0_star': 2.4607768172837723,
    'grim_z0_0.5_half_period_s': 2.6335473106703216,
    'grim_z0_0.5_period_x': 5.400801409165196,
    'grim_z0_0.5_return_z': 0.4999999999999976,
    'bowl_z0_0.5_first_max_r': 2.1991955779456176,
    'bowl_z0_0.5_first_max_z': 1.212453514715174,
    'bowl_z0_0.5_first_min_r': 4.57200840079474,
    'bowl_z0_0.5_first_min_z': 0.8780953200449031,
    'bowl_z0_2_first_max_r': 5.821055004230458,
    'bowl_z0_2_first_max_z': 1.2990127450498505,
    'bowl_z0_2_first_min_r': 3.639680452607548,
    'bowl_z0_2_first_min_z': 0.7368017073028992,
}
