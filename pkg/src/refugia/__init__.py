"""refugia: two-delay prey-predator dynamics with prey refuge.

Library layout:

  model        parameters, rhs, equilibria, feasibility/persistence predicates
  stability    characteristic equation, critical delays (cases I-V), root tracking
  hopf         center-manifold normal form: direction/stability of the bifurcation
  solver       fixed-step RK4 method-of-steps integrator with dense output
  diagnostics  attractor verdicts, peak maps, Lyapunov spectra
  sweep        bifurcation diagrams, (tau1, tau2) region maps, refuge sweeps
  cli          command-line front end (`refugia --help`)
"""
from .model import (Equilibrium, EquilibriumKind, InfeasibleEquilibriumError,
                    ModelParams, SECTION4_PARAMS, SECTION4_PHI, State,
                    boundary_equilibria, interior_equilibrium,
                    nondelay_stability_conditions, persistence_conditions,
                    response, rhs)
from .stability import (CharCoefficients, ComplexRoot, CriticalDelayResult,
                        CriticalRoot, NewtonDivergenceError, NoHopfError,
                        case2_critical, case3_critical, case4_critical,
                        case5_critical, char_coefficients, char_eval,
                        rightmost_root, root_track)
from .hopf import (DegenerateNormalizationError, Direction, HopfContext,
                   HopfReport, OrbitStability, PeriodTrend, SingularSystemError,
                   classify, critical_context)
from .solver import (NegativeStateError, NonFiniteStateError, StepTooLargeError,
                     Trajectory, integrate, linearized_integrate)
from .diagnostics import (AttractorVerdict, DiagnosticsSettings, LyapunovSpectrum,
                          TooFewPeaksError, VerdictKind, classify_attractor,
                          lyapunov_spectrum, peak_analysis)
from .sweep import (RefugeSweepResult, ScanAxis, ScanGrid, ScanResult, ScanRow,
                    bifurcation_scan, critical_curves, refuge_sweep, region_scan)

__version__ = "0.1.0"
