"""Engine for multi-scale exploration of causal knowledge graphs.

Builds deduplicated causal multidigraphs grounded in a category ontology,
lays them out for overview (hierarchical circle packing with hyper-edge
bundles) and detail (layered flow layout), evaluates chained faceted
queries with path search, and organizes the backing document corpus into
nested density clusters with concave boundaries. Everything is served
over a stateless JSON API and driven by the ``atlas`` CLI.
"""

__version__ = "0.1.0"
