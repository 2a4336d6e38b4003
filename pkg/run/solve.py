import hydra
from omegaconf import DictConfig

from src.config import SolveConfig
from src.experiment import main_entry, run_solve


@hydra.main(config_path="conf", config_name="solve", version_base="1.2")
def main(cfg: DictConfig):
    main_entry("solve", SolveConfig, run_solve)(cfg)


if __name__ == "__main__":
    main()
