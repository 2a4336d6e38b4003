import hydra
from omegaconf import DictConfig

from src.config import ImproveConfig
from src.experiment import main_entry, run_improve


@hydra.main(config_path="conf", config_name="improve", version_base="1.2")
def main(cfg: DictConfig):
    main_entry("improve", ImproveConfig, run_improve)(cfg)


if __name__ == "__main__":
    main()
