"""Versioned defaults shared by the library and the command line."""

CONFIG_VERSION = "1"

# Newton retraction
RETRACT_TOL = 1e-12
RETRACT_MAX_ITER = 25

# finite differences
EPS = 1e-4
RICCI_EPS = 5e-3
CURVATURE_EPS = 1e-3

# focal scans
FOCAL_GRID = 64
FOCAL_STEP = 1e-5
FOCAL_THRESHOLD = 1e-4
FOCAL_REFINE_TOL = 1e-6

# Nijenhuis bound |N| <= C eps; frozen from scripts/calibrate_nijenhuis.py
NIJENHUIS_C = 0.15

# spread allowed for the fitted contact constant across points
CONTACT_SPREAD_TOL = 1e-8

PROJ_TOL = 1e-10
ORBIT_TOL = 1e-10
