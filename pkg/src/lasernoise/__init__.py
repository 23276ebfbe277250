"""Event-driven simulators and closed-form noise theory for quiet oscillators.

Modules:
    mathkit    -- bicomplex algebra, root solvers, partitions, special integrals
    pointproc  -- point-process spectral estimators and renewal transforms
    statmech   -- ball-exchange engines, cavity photon statistics, occupancies
    analytic   -- closed-form noise spectra for the solvable models
    montecarlo -- seeded event-driven simulators
    circuits   -- beam-noise calculus and linewidth formulas
    cli        -- scenario-driven command line front end
"""

__version__ = "0.1.0"
