"""recmap: synthetic oblique-plate degradation benchmark, restoration
back-end evaluation over the viewing-angle grid, and recoverability-map
analytics (boundary-AUC and reliability score)."""

__version__ = "0.1.0"
