"""The assembled policy: encoder + graph + values + translator.

act() is deterministic and side-effect free in the environment's eyes,
so the subgoal chosen for a current vertex is memoized: every later
visit to that vertex reuses the plan instead of re-running Dijkstra.
On a PlanningError the agent degrades stepwise: greedy edge following,
then holding position at the current vertex.
"""

import numpy as np

from ..errors import ConsistencyError, PlanningError
from ..plan import PlanConfig, select_graph_action


class Agent:
    def __init__(self, model, translator, graph, values, plan_config=None, action_bounds=None):
        self.model = model
        self.translator = translator
        self.graph = graph
        self.values = values
        self.plan_config = plan_config or PlanConfig()
        self.action_bounds = action_bounds
        self._plan_cache = {}
        self._check_compatible()

    def _check_compatible(self):
        if self.graph.feature_dim != self.model.feature_dim:
            raise ConsistencyError(
                f"graph feature dim {self.graph.feature_dim} != encoder dim {self.model.feature_dim}"
            )
        if self.translator.obs_dim != self.model.obs_dim:
            raise ConsistencyError(
                f"translator obs dim {self.translator.obs_dim} != encoder dim {self.model.obs_dim}"
            )
        if self.translator.action_dim != self.model.action_dim:
            raise ConsistencyError("translator and action decoder disagree on action dim")
        if self.values.values.shape != (self.graph.n_vertices,):
            raise ConsistencyError("value table does not match graph size")
        if self.graph.vertex_states.shape[1] != self.model.obs_dim:
            raise ConsistencyError("graph representative states do not match encoder input")
        ds_graph = self.graph.metadata.get("dataset_sha256")
        # When both artifacts remember their dataset, they must agree.
        for name, obj in (("model", self.model), ("translator", self.translator)):
            meta = getattr(obj, "metadata", None)
            if ds_graph and meta and meta.get("dataset_sha256") not in (None, ds_graph):
                raise ConsistencyError(f"{name} was trained on a different dataset than the graph")

    def current_vertex(self, obs):
        f = self.model.encode_state(np.asarray(obs, dtype=np.float64))
        return int(self.graph.classify(f)[0])

    def subgoal_vertex(self, v_current):
        if v_current in self._plan_cache:
            return self._plan_cache[v_current]
        table = self.values.values
        try:
            target = select_graph_action(self.graph, table, v_current, self.plan_config)
        except PlanningError:
            try:
                greedy = PlanConfig(discount=self.plan_config.discount, greedy=True)
                target = select_graph_action(self.graph, table, v_current, greedy)
            except PlanningError:
                target = v_current
        self._plan_cache[v_current] = target
        return target

    def act(self, obs, rng=None):
        del rng  # signature shared with scripted policies; the agent is deterministic
        v_c = self.current_vertex(obs)
        target = self.subgoal_vertex(v_c)
        goal_state = self.graph.vertex_states[target]
        a = self.translator.translate(obs, goal_state)[0]
        if self.action_bounds is not None:
            a = np.clip(a, self.action_bounds[0], self.action_bounds[1])
        return a

    def replan_with(self, graph, values):
        """Same networks, new graph/value table; plans start fresh."""
        return Agent(
            self.model,
            self.translator,
            graph,
            values,
            plan_config=self.plan_config,
            action_bounds=self.action_bounds,
        )
