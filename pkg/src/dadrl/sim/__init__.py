from .bev import rasterize_bev
from .collision import obb_corners, obb_overlap, vehicles_collide
from .control import ControlConfig, MidLevelController, pure_pursuit_steer, speed_tracking_accel
from .events import StepEvents, detect_events
from .idm import IDMParams, idm_acceleration
from .lane_graph import Lane, LaneGraph, LaneGraphError
from .scenario import Scenario, ScenarioError, TrafficFlow, bundled_scenarios, load_scenario, scenario_from_dict
from .vehicle import BackgroundVehicle, EgoCommand, LaneCommand, VehicleState, bicycle_step
from .world import SimConfig, TrafficSim
