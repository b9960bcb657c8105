"""Seeded vectorized training loop with periodic updates and checkpoints."""

from __future__ import annotations

import csv
import time
from collections import deque
from pathlib import Path

from ..rl import ReplayBuffer, Transition, compute_reward, map_action
from ..seeds import derive_rng, derive_seed
from ..sim import TrafficSim, load_scenario
from .builders import build_agent, build_encoder, random_raw_actions
from .evaluate import evaluate

LOG_HEADER = ["kind", "env_step", "episode", "return", "length", "outcome",
              "success_rate", "critic_loss", "policy_loss", "alpha", "entropy",
              "buffer_size"]

# true terminals bootstrap to zero; max-step truncations keep bootstrapping
TERMINAL_OUTCOMES = ("success", "collision", "offroad")


class Trainer:
    def __init__(self, config, out_dir=None):
        self.config = config
        self.out = Path(out_dir or config.run.out_dir)
        self.out.mkdir(parents=True, exist_ok=True)
        self.scenario = load_scenario(config.run.scenario)
        self.encoder = build_encoder(config)
        self.agent = build_agent(config, self.encoder)
        seed = config.run.seed
        self.buffer = ReplayBuffer(config.rl.buffer_capacity, config.rl.warmup,
                                   seed=derive_seed(seed, "buffer"))
        self.envs = [TrafficSim(self.scenario, config.sim)
                     for _ in range(config.run.workers)]
        self.explore_rng = derive_rng(seed, "explore")
        self.reset_seeds = []

    def _reset_env(self, idx, episode_idx):
        seed = derive_seed(self.config.run.seed, "train", idx, episode_idx)
        self.reset_seeds.append(seed)
        return self.envs[idx].reset(seed)

    def _sidecar_extra(self, env_step):
        return {"env_steps": env_step,
                "explore_rng": self.explore_rng.bit_generator.state}

    def _validation_score(self, env_step):
        """Deterministic-policy score on the validation seed family.

        Collisions weigh double: the selection target is a policy that
        completes routes without hitting anyone, not one that rushes.
        """
        _, summary = evaluate(self.config, agent=self.agent,
                              scenario=self.scenario,
                              episodes=self.config.run.eval_episodes_val,
                              seed_tag="val")
        score = summary["succ_pct"] - 2.0 * summary["coll_pct"]
        return score, summary

    def run(self, log_name="train_log.csv", checkpoint_name="checkpoint"):
        cfg = self.config
        run = cfg.run
        t_start = time.time()
        log_path = self.out / log_name
        log_file = open(log_path, "w", newline="")
        log = csv.writer(log_file)
        log.writerow(LOG_HEADER)

        n_env = len(self.envs)
        episode_idx = [0] * n_env
        obs = [self._reset_env(i, 0) for i in range(n_env)]
        ep_return = [0.0] * n_env
        ep_len = [0] * n_env
        recent = deque(maxlen=max(run.early_stop_window, 1))
        env_step = 0
        episodes_done = 0
        updates = 0
        steps_since_update = 0
        next_checkpoint = run.checkpoint_every
        next_eval = run.eval_every if run.eval_every else None
        best = None  # (score, env_step) of the best validation pass
        stopped_early = False
        last_report = {}

        while env_step < run.total_steps and not stopped_early:
            if self.buffer.ready:
                actions = self.agent.act(obs, rng=self.explore_rng)
            else:
                actions = random_raw_actions(self.explore_rng, n_env)

            for i, env in enumerate(self.envs):
                command = map_action(actions[i], cfg.reward.v_max)
                next_obs, events = env.step(command)
                reward = compute_reward(events, env.ego, cfg.reward)
                terminal = env.done and env.outcome in TERMINAL_OUTCOMES
                self.buffer.push(Transition(obs[i], actions[i], next_obs,
                                            reward, terminal))
                ep_return[i] += reward
                ep_len[i] += 1
                env_step += 1
                steps_since_update += 1
                if env.done:
                    episodes_done += 1
                    # the early-stop window tracks the trained policy only;
                    # warmup episodes ran on random actions
                    if updates > 0:
                        recent.append(1.0 if env.outcome == "success" else 0.0)
                    success_rate = (sum(recent) / len(recent)) if recent else 0.0
                    log.writerow(["episode", env_step, episodes_done,
                                  repr(ep_return[i]), ep_len[i], env.outcome,
                                  repr(success_rate), "", "", "", "",
                                  len(self.buffer)])
                    episode_idx[i] += 1
                    obs[i] = self._reset_env(i, episode_idx[i])
                    ep_return[i] = 0.0
                    ep_len[i] = 0
                else:
                    obs[i] = next_obs

            if self.buffer.ready:
                while steps_since_update >= cfg.rl.update_every:
                    steps_since_update -= cfg.rl.update_every
                    for _ in range(cfg.rl.updates_per_round):
                        batch = self.buffer.sample(cfg.rl.batch_size)
                        last_report = self.agent.update(batch)
                        updates += 1
                        if updates % run.log_updates_every == 0:
                            log.writerow([
                                "update", env_step, "", "", "", "", "",
                                repr(last_report["critic_loss"]),
                                repr(last_report["policy_loss"]),
                                repr(last_report["alpha"]),
                                repr(last_report["entropy"]),
                                len(self.buffer)])
            else:
                steps_since_update = 0  # warmup steps do not accrue updates

            if env_step >= next_checkpoint:
                stem = self.out / f"{checkpoint_name}_{env_step}"
                self.agent.save(f"{stem}.ckpt", f"{stem}.json",
                                extra=self._sidecar_extra(env_step))
                next_checkpoint += run.checkpoint_every

            if next_eval is not None and env_step >= next_eval and updates > 0:
                score, val = self._validation_score(env_step)
                log.writerow(["val", env_step, "", repr(score), "", "",
                              repr(val["succ_pct"] / 100.0), "", "", "", "",
                              len(self.buffer)])
                if best is None or score > best[0]:
                    best = (score, env_step)
                    self.agent.save(self.out / "best.ckpt",
                                    self.out / "best.json",
                                    extra=self._sidecar_extra(env_step))
                next_eval += run.eval_every

            if (run.early_stop_success and len(recent) == recent.maxlen
                    and sum(recent) / len(recent) >= run.early_stop_success):
                stopped_early = True

        selected = "final"
        if best is not None:
            score, val = self._validation_score(env_step)
            log.writerow(["val", env_step, "", repr(score), "", "",
                          repr(val["succ_pct"] / 100.0), "", "", "", "",
                          len(self.buffer)])
            if score < best[0]:
                # training quality is not monotone; ship the best validated
                # parameters rather than whatever the last update produced
                self.agent.load(self.out / "best.ckpt", self.out / "best.json")
                selected = f"best@{best[1]}"
        final = self.out / f"{checkpoint_name}.ckpt"
        self.agent.save(final, self.out / f"{checkpoint_name}.json",
                        extra=self._sidecar_extra(env_step))
        log_file.close()
        return {
            "env_steps": env_step,
            "episodes": episodes_done,
            "updates": updates,
            "stopped_early": stopped_early,
            "selected": selected,
            "train_success_rate": (sum(recent) / len(recent)) if recent else 0.0,
            "wall_seconds": time.time() - t_start,
            "checkpoint": str(final),
            "log": str(log_path),
        }
