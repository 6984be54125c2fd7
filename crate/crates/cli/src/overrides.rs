//! One `--<key> VALUE` flag per scenario key.

use clap::{Arg, ArgMatches, Args, FromArgMatches};
use tdle::ScenarioConfig;

/// Keys with dedicated flags on the subcommands.
const RESERVED: [&str; 3] = ["map", "planner", "seeds"];

fn flag_keys() -> impl Iterator<Item = &'static str> {
    ScenarioConfig::keys().filter(|k| !RESERVED.contains(k))
}

/// Scenario keys set on the command line, in key order.
#[derive(Debug, Clone, Default)]
pub struct Overrides(pub Vec<(String, String)>);

impl FromArgMatches for Overrides {
    fn from_arg_matches(m: &ArgMatches) -> Result<Self, clap::Error> {
        let mut out = Self::default();
        out.update_from_arg_matches(m)?;
        Ok(out)
    }

    fn update_from_arg_matches(&mut self, m: &ArgMatches) -> Result<(), clap::Error> {
        for key in flag_keys() {
            if let Some(v) = m.get_one::<String>(key) {
                self.0.push((key.to_string(), v.clone()));
            }
        }
        Ok(())
    }
}

impl Args for Overrides {
    fn augment_args(cmd: clap::Command) -> clap::Command {
        let mut cmd = cmd.next_help_heading("Scenario keys");
        for key in flag_keys() {
            let mut arg = Arg::new(key).long(key).value_name("VALUE").hide_short_help(true);
            if key.contains('_') {
                let dashed: &'static str = Box::leak(key.replace('_', "-").into_boxed_str());
                arg = arg.alias(dashed);
            }
            cmd = cmd.arg(arg);
        }
        cmd
    }

    fn augment_args_for_update(cmd: clap::Command) -> clap::Command {
        Self::augment_args(cmd)
    }
}
