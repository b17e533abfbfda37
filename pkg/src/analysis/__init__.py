"""Analysis stages: quantum core, round semantics, chains, properties, simulation, fits, export."""
