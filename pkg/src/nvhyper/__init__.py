"""State-vector toolkit for NV-center-assisted photonic hyperentanglement.

Polarization and spatial-mode qubits of flying photons interact with NV
electron spins through cavity reflection; the package builds the generation
and analysis circuits, executes them in ideal or lossy mode, and compares the
results with closed-form fidelity/efficiency expressions.
"""

__version__ = "0.1.0"
