import sys

from trig_wind.cli import main

sys.exit(main())
