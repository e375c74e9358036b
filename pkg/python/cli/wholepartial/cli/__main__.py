# SPDX-License-Identifier: MIT-0

from wholepartial.shared.log import get_logger
import wholepartial.cli.main as main


if __name__ == '__main__':
  logger = get_logger()
  main.main()
