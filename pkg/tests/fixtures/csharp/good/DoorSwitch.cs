using UnityEngine;

public interface ISwitchTarget
{
    void OnSwitchChanged(bool pressed);
}

public class DoorSwitch : MonoBehaviour
{
    [SerializeField] private GameObject door;
    [SerializeField] private bool latching = true;

    private bool pressed;

    public void Press()
    {
        pressed = true;
        Apply();
    }

    public void Release()
    {
        if (!latching)
        {
            pressed = false;
            Apply();
        }
    }

    public bool IsPressed()
    {
        return pressed;
    }

    private void Apply()
    {
        if (door != null)
        {
            door.SetActive(!pressed);
        }
    }
}
