"""Critical plus conventional quantum metrology with the squeezing Hamiltonian."""
__version__ = "0.1.0"
