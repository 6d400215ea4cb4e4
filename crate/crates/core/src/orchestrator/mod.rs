//! The full loop: agent training, joint inference, the evaluation mode
//! matrix and report files.

mod bundle;
mod config;
mod data;
mod evaluate;
mod report;
mod run;
mod train;

pub use bundle::{load_agent, weights_file, AgentBundle};
pub use config::{parse_modes, EvalMode, RunConfig};
pub use data::{
    degrade_dataset_cmd, degraded_set, generate_dataset_cmd, generate_scenes, test_scenes, train_scenes,
    TRAIN_KEY_OFFSET, VARIANTS_PER_SCENE,
};
pub use evaluate::{evaluate_modes, EvalReport, ModeResult};
pub use report::{emit_report, format_table, load_report, METRICS, REPORT_CSV, REPORT_JSON};
pub use run::{rollout, run_rl_aod, Rollout, RunOutput, Snapshot, Trajectory, TrajectoryStep};
pub use train::{train_agent, train_agents, train_and_save, write_train_log, TrainLogRow, TrainedAgent};
