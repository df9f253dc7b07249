from __future__ import annotations

import random

import pytest

from atlas.dataset import LoadOptions, load_dataset
from atlas.fixtures import scenario_fixture
from atlas.ingest import assemble
from atlas.model import Agent, CausalStatement, Evidence, StatementType


@pytest.fixture(scope="session")
def scenario_dir(tmp_path_factory):
    return scenario_fixture(tmp_path_factory.mktemp("scenario") / "data")


@pytest.fixture(scope="session")
def scenario_dataset(scenario_dir):
    return load_dataset(scenario_dir, LoadOptions(min_cluster_size=5, min_samples=2))


def random_graph(seed: int, n_agents: int = 8, n_statements: int = 14):
    """Small random multidigraph for oracle tests."""
    rng = random.Random(seed)
    agents = [
        Agent(f"a{i}", f"A{i}", f"root/g{i % 3}/s{i % 2}") for i in range(n_agents)
    ]
    statements = []
    types = list(StatementType)
    for i in range(n_statements):
        subj, obj = rng.sample(range(n_agents), 2)
        evidence = tuple(
            Evidence(f"ev{i}.{k}", f"10.1/d{rng.randint(0, 5)}", "r")
            for k in range(rng.randint(1, 3))
        )
        statements.append(
            CausalStatement(
                id=f"s{i}",
                statement_type=rng.choice(types),
                subj=f"a{subj}",
                obj=f"a{obj}",
                belief=rng.random(),
                curated=rng.random() < 0.3,
                evidence=evidence,
            )
        )
    return assemble(statements, agents, graph_id=f"g{seed}")
