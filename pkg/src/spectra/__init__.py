"""Band structures and band-edge diagnostics for periodic discrete Schrodinger operators on Z^d."""
