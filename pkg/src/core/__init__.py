# Core types: quadratic weights, phase space, exceptions and report rows.
