//! `evrgbd` command-line tool.
//!
//! Every command writes its outputs into one directory together with the
//! resolved settings that produced them, so any number it prints can be
//! regenerated.

pub mod commands;
pub mod config;
pub mod layout;

use std::path::PathBuf;

use anyhow::Result;
use clap::{Parser, Subcommand};

use crate::config::{RunArgs, SequenceArgs};

#[derive(Parser, Debug)]
#[command(
    name = "evrgbd",
    version,
    about = "Event-camera structured-light RGB-D toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a pattern sequence: manifest, bitmaps and coverage.
    Patterns {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        calibration: Option<PathBuf>,
        #[command(flatten)]
        sequence: SequenceArgs,
        /// Also write DMD-native bitmaps for a diamond-pixel projector.
        #[arg(long)]
        diamond: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Render a scene into an event stream.
    Simulate(RunArgs),
    /// Tag an event stream with depth and color.
    Tag {
        #[arg(long)]
        events: PathBuf,
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        calibration: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Accumulate tagged events into frames and point clouds.
    Reconstruct {
        #[arg(long)]
        tagged: PathBuf,
        #[arg(long)]
        calibration: Option<PathBuf>,
        #[arg(long)]
        window_us: u64,
        #[arg(long, default_value = "median")]
        policy: evrgbd::recon::DepthPolicy,
        /// Events per pixel at full albedo, as simulated.
        #[arg(long, default_value_t = 4)]
        k_max: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare reconstructed frames with ground truth.
    Evaluate {
        #[arg(long)]
        frames: PathBuf,
        #[arg(long)]
        gt: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Patterns, simulation, tagging, reconstruction and evaluation in one go.
    Pipeline(RunArgs),
    /// Write ground-truth depth and color frames for a scene.
    Oracle(RunArgs),
}

pub fn run(cli: Cli) -> Result<()> {
    use commands::*;
    match cli.command {
        Command::Patterns {
            config,
            calibration,
            sequence,
            diamond,
            out,
        } => {
            let args = RunArgs {
                config,
                calibration,
                sequence,
                ..RunArgs::default()
            };
            patterns::run(&args.resolve()?, diamond, &out)
        }
        Command::Simulate(args) => simulate::run(&args.resolve()?),
        Command::Tag {
            events,
            manifest,
            calibration,
            out,
        } => tag::run(&events, &manifest, calibration.as_deref(), &out),
        Command::Reconstruct {
            tagged,
            calibration,
            window_us,
            policy,
            k_max,
            out,
        } => reconstruct::run(&reconstruct::Options {
            tagged,
            calibration,
            window_us,
            policy,
            k_max,
            out,
        }),
        Command::Evaluate { frames, gt, out } => evaluate::run(&frames, &gt, out.as_deref()),
        Command::Pipeline(args) => pipeline::run(&args.resolve()?),
        Command::Oracle(args) => oracle::run(&args.resolve()?),
    }
}
