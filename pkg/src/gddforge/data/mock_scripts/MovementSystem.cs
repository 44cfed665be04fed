using UnityEngine;

public class MovementSystem : MonoBehaviour
{
    [SerializeField] private PlayerController player;
    [SerializeField] private float acceleration = 40f;
    [SerializeField] private float maxSpeed = 8f;
    [SerializeField] private float airControlFactor = 0.6f;

    private float currentSpeed;
    private bool dashAvailable = true;

    private void Update()
    {
        float input = Input.GetAxis("Horizontal");
        ApplyAcceleration(input);
        if (Input.GetButtonDown("Fire3") && dashAvailable)
        {
            Dash(input);
        }
    }

    public void ApplyAcceleration(float input)
    {
        float control = player != null && player.IsGrounded() ? 1f : airControlFactor;
        currentSpeed = Mathf.MoveTowards(currentSpeed, input * maxSpeed, acceleration * control * Time.deltaTime);
        if (player != null)
        {
            player.Move(currentSpeed / maxSpeed);
        }
    }

    public void Dash(float direction)
    {
        dashAvailable = false;
        currentSpeed = Mathf.Sign(direction) * maxSpeed * 2f;
        Invoke(nameof(ResetDash), 1.2f);
    }

    public float GetCurrentSpeed()
    {
        return currentSpeed;
    }

    private void ResetDash()
    {
        dashAvailable = true;
    }
}
